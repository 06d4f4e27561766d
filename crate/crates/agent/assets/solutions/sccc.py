import networkx as nx


def solve(edge_list):
    try:
        G = nx.DiGraph()
        G.add_edges_from(edge_list)
        return nx.number_strongly_connected_components(G)
    except Exception:
        return None
