import networkx as nx


def solve(edge_list):
    try:
        G = nx.DiGraph()
        G.add_edges_from(edge_list)
        comps = sorted(nx.strongly_connected_components(G), key=min)
        result = []
        for comp in comps:
            sub = G.subgraph(comp).to_undirected()
            result.append(float(nx.diameter(sub)) if len(comp) > 1 else 0.0)
        return result
    except Exception:
        return None
