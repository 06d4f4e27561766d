import networkx as nx


def solve(edge_list, source, target):
    try:
        G = nx.Graph()
        G.add_edges_from(edge_list)
        dist = nx.single_source_shortest_path_length(G, target)
        if source not in dist:
            return None
        path = [source]
        while path[-1] != target:
            here = path[-1]
            path.append(min(n for n in G.neighbors(here) if dist.get(n) == dist[here] - 1))
        coeffs = [float(nx.clustering(G, v)) for v in path]
        best = 0
        for i, c in enumerate(coeffs):
            if c > coeffs[best]:
                best = i
        return (path[best], coeffs)
    except Exception:
        return None
