#pragma once

#include <string>
#include <vector>

namespace bgwtilt {

/// Finite K-type plane tree. Nodes are stored in depth-first (preorder)
/// order; children of a node are contiguous in birth order.
struct TypedTree {
    struct Node {
        int parent = -1;
        int type = 0; // 0-based
        std::vector<int> children;
    };
    std::vector<Node> nodes;
    std::vector<long long> type_counts; // N_i, length K

    std::size_t size() const { return nodes.size(); }
    int root_type() const { return nodes.front().type; }
};

TypedTree single_node_tree(int type, int num_types);

int tree_height(const TypedTree& t);

std::vector<int> node_depths(const TypedTree& t);

/// Induced subtree on the vertices at depth <= radius (types preserved,
/// boundary vertices become leaves).
TypedTree ball(const TypedTree& t, int radius);

/// Canonical form: preorder tokens "type:outdegree" (1-based types),
/// space-separated. Injective on typed plane trees.
std::string serialize_tree(const TypedTree& t);

/// Serialisation of the depth-r neighbourhood where every vertex at depth
/// <= radius reports its outdegree in the *full* tree (recursion stops below
/// depth radius). With radius >= height this is serialize_tree.
std::string ball_signature(const TypedTree& t, int radius);

/// Inverse of serialize_tree (tests and file ingestion).
TypedTree parse_tree(const std::string& line, int num_types);

} // namespace bgwtilt
