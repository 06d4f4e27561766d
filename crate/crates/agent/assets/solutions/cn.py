import networkx as nx


def solve(edge_list, u, v):
    try:
        G = nx.Graph()
        G.add_edges_from(edge_list)
        return len(list(nx.common_neighbors(G, u, v)))
    except Exception:
        return None
