#include "bgwtilt/tree.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bgwtilt {

TypedTree single_node_tree(int type, int num_types) {
    TypedTree t;
    t.nodes.push_back({-1, type, {}});
    t.type_counts.assign(static_cast<std::size_t>(num_types), 0);
    t.type_counts[static_cast<std::size_t>(type)] = 1;
    return t;
}

std::vector<int> node_depths(const TypedTree& t) {
    std::vector<int> depth(t.nodes.size(), 0);
    for (std::size_t i = 1; i < t.nodes.size(); ++i)
        depth[i] = depth[static_cast<std::size_t>(t.nodes[i].parent)] + 1;
    return depth;
}

int tree_height(const TypedTree& t) {
    int h = 0;
    for (int d : node_depths(t)) h = std::max(h, d);
    return h;
}

TypedTree ball(const TypedTree& t, int radius) {
    TypedTree out;
    out.type_counts.assign(t.type_counts.size(), 0);
    // preorder copy, cut below `radius`
    struct Item {
        int src;
        int parent_dst;
        int depth;
    };
    std::vector<Item> stack{{0, -1, 0}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        int dst = static_cast<int>(out.nodes.size());
        out.nodes.push_back({it.parent_dst, t.nodes[static_cast<std::size_t>(it.src)].type, {}});
        ++out.type_counts[static_cast<std::size_t>(out.nodes.back().type)];
        if (it.parent_dst >= 0)
            out.nodes[static_cast<std::size_t>(it.parent_dst)].children.push_back(dst);
        if (it.depth < radius) {
            const auto& ch = t.nodes[static_cast<std::size_t>(it.src)].children;
            for (auto c = ch.rbegin(); c != ch.rend(); ++c)
                stack.push_back({*c, dst, it.depth + 1});
        }
    }
    // LIFO gives preorder, but children were pushed reversed so birth order is kept
    return out;
}

namespace {

void emit(const TypedTree& t, int node, int depth, int radius, std::string& out) {
    const auto& n = t.nodes[static_cast<std::size_t>(node)];
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(n.type + 1);
    out.push_back(':');
    out += std::to_string(n.children.size());
    if (depth < radius)
        for (int c : n.children) emit(t, c, depth + 1, radius, out);
}

} // namespace

std::string serialize_tree(const TypedTree& t) {
    std::string out;
    emit(t, 0, 0, static_cast<int>(t.nodes.size()) + 1, out);
    return out;
}

std::string ball_signature(const TypedTree& t, int radius) {
    std::string out;
    emit(t, 0, 0, radius, out);
    return out;
}

TypedTree parse_tree(const std::string& line, int num_types) {
    std::istringstream in(line);
    std::string tok;
    TypedTree t;
    t.type_counts.assign(static_cast<std::size_t>(num_types), 0);
    // preorder reconstruction via pending-children stack
    std::vector<std::pair<int, int>> pending; // node, children still to attach
    while (in >> tok) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw std::runtime_error("bad tree token '" + tok + "'");
        int type = std::stoi(tok.substr(0, colon)) - 1;
        int outdeg = std::stoi(tok.substr(colon + 1));
        if (type < 0 || type >= num_types) throw std::runtime_error("tree type out of range");
        int parent = -1;
        if (!t.nodes.empty()) {
            while (!pending.empty() && pending.back().second == 0) pending.pop_back();
            if (pending.empty()) throw std::runtime_error("tree tokens after completion");
            parent = pending.back().first;
            --pending.back().second;
        }
        int idx = static_cast<int>(t.nodes.size());
        t.nodes.push_back({parent, type, {}});
        ++t.type_counts[static_cast<std::size_t>(type)];
        if (parent >= 0) t.nodes[static_cast<std::size_t>(parent)].children.push_back(idx);
        pending.emplace_back(idx, outdeg);
    }
    while (!pending.empty() && pending.back().second == 0) pending.pop_back();
    if (t.nodes.empty() || !pending.empty()) throw std::runtime_error("truncated tree line");
    return t;
}

} // namespace bgwtilt
