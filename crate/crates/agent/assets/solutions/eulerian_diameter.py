import networkx as nx


def solve(edge_list, source, target):
    try:
        G = nx.Graph()
        G.add_edges_from(edge_list)
        if nx.has_eulerian_path(G):
            return float(nx.diameter(G))
        return float(max(nx.clustering(G, source), nx.clustering(G, target)))
    except Exception:
        return None
