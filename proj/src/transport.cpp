#include "ftk/dist.hpp"

#include <cassert>
#include <stdexcept>

namespace ftk {

namespace {

// Spanning-tree transportation simplex with Bland's pivoting rule.
// Nodes: rows 0..m-1, columns m..m+n-1. Basic cells form a tree.
struct Simplex {
    int m, n;
    const std::vector<int64_t>& cost;
    std::vector<int64_t> x;            // values on basic cells
    std::vector<int> brow, bcol;       // basic cell endpoints
    std::vector<char> in_basis;        // per cell i*n+j
    std::vector<std::vector<int>> adj; // node -> basic cell indices

    Simplex(int m_, int n_, const std::vector<int64_t>& c) : m(m_), n(n_), cost(c) {
        in_basis.assign(size_t(m) * n, 0);
        adj.assign(size_t(m) + n, {});
    }

    int cell_id(int i, int j) const { return i * n + j; }

    void add_basic(int i, int j, int64_t v) {
        int b = int(brow.size());
        brow.push_back(i);
        bcol.push_back(j);
        x.push_back(v);
        in_basis[cell_id(i, j)] = 1;
        adj[i].push_back(b);
        adj[size_t(m) + j].push_back(b);
    }

    void remove_basic(int b) {
        in_basis[cell_id(brow[b], bcol[b])] = 0;
        auto drop = [&](int node) {
            auto& v = adj[node];
            for (size_t k = 0; k < v.size(); ++k)
                if (v[k] == b) { v[k] = v.back(); v.pop_back(); break; }
        };
        drop(brow[b]);
        drop(size_t(m) + bcol[b]);
        brow[b] = -1;
    }

    // potentials via tree traversal; u[row0] = 0
    void potentials(std::vector<int64_t>& u, std::vector<int64_t>& v) const {
        u.assign(m, 0);
        v.assign(n, 0);
        std::vector<char> seen(size_t(m) + n, 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        while (!stack.empty()) {
            int node = stack.back();
            stack.pop_back();
            for (int b : adj[node]) {
                if (brow[b] < 0) continue;
                int other = (node < m) ? m + bcol[b] : brow[b];
                if (seen[other]) continue;
                seen[other] = 1;
                int64_t c = cost[size_t(brow[b]) * n + bcol[b]];
                if (other < m) u[other] = c - v[node - m];
                else v[other - m] = c - u[node];
                stack.push_back(other);
            }
        }
    }

    // path of basic cells from row node i to column node m+j
    std::vector<int> tree_path(int from, int to) const {
        std::vector<int> par_edge(size_t(m) + n, -1), par_node(size_t(m) + n, -1);
        std::vector<char> seen(size_t(m) + n, 0);
        std::vector<int> queue = {from};
        seen[from] = 1;
        for (size_t h = 0; h < queue.size(); ++h) {
            int node = queue[h];
            if (node == to) break;
            for (int b : adj[node]) {
                if (brow[b] < 0) continue;
                int other = (node < m) ? m + bcol[b] : brow[b];
                if (seen[other]) continue;
                seen[other] = 1;
                par_edge[other] = b;
                par_node[other] = node;
                queue.push_back(other);
            }
        }
        std::vector<int> path;
        for (int node = to; node != from; node = par_node[node]) {
            assert(par_edge[node] >= 0);
            path.push_back(par_edge[node]);
        }
        return path;   // ordered to -> from
    }
};

} // namespace

Int transport_min_cost(const std::vector<int64_t>& supply,
                       const std::vector<int64_t>& demand,
                       const std::vector<int64_t>& cost) {
    int m = int(supply.size()), n = int(demand.size());
    if (m == 0 || n == 0) throw std::invalid_argument("empty transport problem");
    assert(cost.size() == size_t(m) * n);
    int64_t total_s = 0, total_d = 0;
    for (auto s : supply) { assert(s >= 0); total_s += s; }
    for (auto d : demand) { assert(d >= 0); total_d += d; }
    if (total_s != total_d) throw std::invalid_argument("unbalanced transport problem");

    Simplex sx(m, n, cost);

    // northwest corner start; keep zero cells basic so the tree spans
    {
        std::vector<int64_t> s = supply, d = demand;
        int i = 0, j = 0;
        while (i < m && j < n) {
            int64_t v = std::min(s[i], d[j]);
            sx.add_basic(i, j, v);
            s[i] -= v;
            d[j] -= v;
            if (i == m - 1 && j == n - 1) break;
            if (s[i] == 0 && i < m - 1) ++i;
            else ++j;
        }
    }

    std::vector<int64_t> u, v;
    for (;;) {
        sx.potentials(u, v);
        int enter_i = -1, enter_j = -1;
        for (int i = 0; i < m && enter_i < 0; ++i)
            for (int j = 0; j < n; ++j) {
                if (sx.in_basis[sx.cell_id(i, j)]) continue;
                if (cost[size_t(i) * n + j] - u[i] - v[j] < 0) {
                    enter_i = i;
                    enter_j = j;
                    break;   // Bland: first improving cell
                }
            }
        if (enter_i < 0) break;

        // cycle: entering cell + tree path col(enter_j) -> row(enter_i)
        std::vector<int> path = sx.tree_path(enter_i, m + enter_j);
        // entering edge gets +theta; along the path starting at the column
        // node, edges alternate -,+,-,...
        int64_t theta = -1;
        int leave = -1;
        for (size_t k = 0; k < path.size(); k += 2) {
            int b = path[k];
            if (theta < 0 || sx.x[b] < theta ||
                (sx.x[b] == theta && sx.cell_id(sx.brow[b], sx.bcol[b]) <
                                         sx.cell_id(sx.brow[leave], sx.bcol[leave]))) {
                theta = sx.x[b];
                leave = b;
            }
        }
        assert(leave >= 0);
        for (size_t k = 0; k < path.size(); ++k) {
            if (k % 2 == 0) sx.x[path[k]] -= theta;
            else sx.x[path[k]] += theta;
        }
        sx.remove_basic(leave);
        sx.add_basic(enter_i, enter_j, theta);
    }

    Int obj = 0;
    for (size_t b = 0; b < sx.x.size(); ++b) {
        if (sx.brow[b] < 0 || sx.x[b] == 0) continue;
        Int term = Int(cost[size_t(sx.brow[b]) * n + sx.bcol[b]]);
        term *= Int((long)sx.x[b]);
        obj += term;
    }
    return obj;
}

} // namespace ftk
