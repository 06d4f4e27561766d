import networkx as nx


def solve(edge_list, source, target):
    try:
        G = nx.DiGraph()
        G.add_weighted_edges_from(edge_list)
        flow = nx.maximum_flow_value(G, source, target, capacity="weight")
        undirected = G.to_undirected()
        return flow * (1 + (nx.clustering(undirected, source) + nx.clustering(undirected, target)) / 2)
    except Exception:
        return None
