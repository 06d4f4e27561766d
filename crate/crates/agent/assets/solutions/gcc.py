import networkx as nx


def solve(edge_list):
    try:
        G = nx.Graph()
        G.add_edges_from(edge_list)
        return nx.is_connected(G)
    except Exception:
        return None
