import networkx as nx


def solve(edge_list, node):
    try:
        G = nx.Graph()
        G.add_edges_from(edge_list)
        return float(nx.clustering(G, node))
    except Exception:
        return None
