import networkx as nx


def solve(edge_list, source, target):
    try:
        G = nx.DiGraph()
        G.add_weighted_edges_from(edge_list)
        return float(nx.shortest_path_length(G, source, target, weight="weight"))
    except Exception:
        return None
