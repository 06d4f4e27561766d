import networkx as nx


def solve(edge_list, source, target):
    try:
        G = nx.DiGraph()
        G.add_weighted_edges_from(edge_list)
        return float(nx.maximum_flow_value(G, source, target, capacity="weight"))
    except Exception:
        return None
