import networkx as nx


def solve(edge_list):
    try:
        G = nx.Graph()
        G.add_edges_from(edge_list)
        if nx.is_connected(G):
            return nx.diameter(G)
        comps = sorted(nx.connected_components(G), key=lambda c: (-len(c), min(c)))
        return nx.diameter(G.subgraph(comps[0]))
    except Exception:
        return None
