import networkx as nx


def solve(edge_list, source, target):
    try:
        G = nx.Graph()
        G.add_weighted_edges_from(edge_list)
        d = nx.shortest_path_length(G, source, target, weight="weight")
        common = len(list(nx.common_neighbors(G, source, target)))
        mean_c = (nx.clustering(G, source) + nx.clustering(G, target)) / 2
        return (common + mean_c) / (1 + d)
    except Exception:
        return None
