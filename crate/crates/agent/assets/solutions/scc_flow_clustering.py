import networkx as nx


def solve(edge_list, target):
    try:
        G = nx.DiGraph()
        G.add_weighted_edges_from(edge_list)
        undirected = G.to_undirected()
        best, best_score = None, None
        for comp in sorted(nx.strongly_connected_components(G), key=min):
            rep = min(comp)
            flow = 0.0 if rep == target else nx.maximum_flow_value(G, rep, target, capacity="weight")
            score = flow * (1 + nx.clustering(undirected, rep))
            if best_score is None or score > best_score:
                best, best_score = comp, score
        return sorted(best)
    except Exception:
        return None
