# label: logical_error
# task: sp
import networkx as nx


def solve(edge_list, source, target):
    G = nx.DiGraph()
    G.add_weighted_edges_from(edge_list)
    return nx.shortest_path(G, source, target, weight="weight")
