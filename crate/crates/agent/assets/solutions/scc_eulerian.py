import networkx as nx


def solve(edge_list):
    try:
        G = nx.DiGraph()
        G.add_edges_from(edge_list)
        comps = list(nx.strongly_connected_components(G))
        if nx.has_eulerian_path(G):
            return max(len(c) for c in comps)
        return len(comps)
    except Exception:
        return None
