import networkx as nx


def solve(edge_list, k):
    try:
        G = nx.Graph()
        G.add_edges_from(edge_list)
        n = G.number_of_nodes()
        scores = []
        for v in G.nodes():
            dist = nx.single_source_shortest_path_length(G, v)
            mean = sum(dist.values()) / (n - 1)
            scores.append((v, (1 - nx.clustering(G, v)) / mean))
        scores.sort(key=lambda p: (-p[1], p[0]))
        return {v: s for v, s in scores[:k]}
    except Exception:
        return None
