#include <algorithm>
#include <cmath>
#include <limits>

#include "itr/core/error.hpp"
#include "itr/core/random.hpp"
#include "itr/flex/bart.hpp"
#include "itr/kernels/kernels.hpp"

namespace itr {

namespace {

struct Node {
    int var = -1;
    int cut = -1;
    int left = -1;
    int right = -1;
    int parent = -1;
    int depth = 0;
    double mu = 0.0;
    bool alive = true;

    bool leaf() const { return var < 0; }
};

struct Tree {
    std::vector<Node> nodes{Node{}};
    std::vector<int> free_slots;

    int add(const Node& n) {
        if (!free_slots.empty()) {
            const int k = free_slots.back();
            free_slots.pop_back();
            nodes[static_cast<std::size_t>(k)] = n;
            return k;
        }
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }
    void remove(int k) {
        nodes[static_cast<std::size_t>(k)].alive = false;
        free_slots.push_back(k);
    }
    Node& operator[](int k) { return nodes[static_cast<std::size_t>(k)]; }
    const Node& operator[](int k) const { return nodes[static_cast<std::size_t>(k)]; }
    bool root_only() const { return nodes[0].leaf(); }
    bool is_nog(int k) const {
        const Node& n = (*this)[k];
        return !n.leaf() && (*this)[n.left].leaf() && (*this)[n.right].leaf();
    }
};

struct Range {
    std::vector<int> lo, hi;  // admissible cut indices per input, inclusive

    bool any() const {
        for (std::size_t v = 0; v < lo.size(); ++v)
            if (lo[v] <= hi[v]) return true;
        return false;
    }
    int vars() const {
        int c = 0;
        for (std::size_t v = 0; v < lo.size(); ++v) c += lo[v] <= hi[v];
        return c;
    }
};

class Sampler {
public:
    Sampler(const Matrix& u, const BinaryVector& y, const BartConfig& c, std::uint64_t seed)
        : cfg_(c), n_(u.rows()), p_(u.cols()), y_(y), rng_(seed) {
        cuts_.resize(p_);
        rank_.assign(p_ * n_, 0);
        ncut_.resize(p_);
        std::vector<double> col(n_);
        for (std::size_t v = 0; v < p_; ++v) {
            for (std::size_t i = 0; i < n_; ++i) col[i] = u(i, v);
            std::vector<double> vals = col;
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            for (std::size_t i = 0; i < n_; ++i)
                rank_[v * n_ + i] = static_cast<int>(
                    std::lower_bound(vals.begin(), vals.end(), col[i]) - vals.begin());
            vals.pop_back();
            ncut_[v] = static_cast<int>(vals.size());
            cuts_[v] = std::move(vals);
        }
        double s = 0.0;
        for (auto v : y_) s += v;
        offset_ = normal_quantile((s + 0.5) / (static_cast<double>(n_) + 1.0));
        sigma2_ = std::pow(3.0 / (cfg_.k * std::sqrt(static_cast<double>(cfg_.num_trees))), 2);

        const auto m = static_cast<std::size_t>(cfg_.num_trees);
        trees_.resize(m);
        fit_.assign(m * n_, 0.0);
        leaf_of_.assign(m, std::vector<int>(n_, 0));
        total_.assign(n_, 0.0);
        z_.assign(n_, 0.0);
        resid_.assign(n_, 0.0);
        fresh_.assign(n_, 0.0);
        update_latent();
    }

    ProbitForest run() {
        std::vector<ForestDraw> draws;
        draws.reserve(static_cast<std::size_t>(cfg_.retained()));
        for (int it = 0; it < cfg_.iterations; ++it) {
            for (std::size_t j = 0; j < trees_.size(); ++j) step(j);
            update_latent();
            if (it >= cfg_.burn_in) draws.push_back(snapshot());
        }
        return ProbitForest(cuts_, offset_, std::move(draws));
    }

private:
    double lml(double n, double s) const {
        const double a = 1.0 + n * sigma2_;
        return -0.5 * std::log(a) + sigma2_ * s * s / (2.0 * a);
    }

    double psplit(int depth, const Range& r) const {
        return r.any() ? split_prior_prob(cfg_, depth) : 0.0;
    }

    Range range_of(const Tree& t, int k) const {
        Range r;
        r.lo.assign(p_, 0);
        r.hi.resize(p_);
        for (std::size_t v = 0; v < p_; ++v) r.hi[v] = ncut_[v] - 1;
        int child = k;
        for (int a = t[k].parent; a >= 0; child = a, a = t[a].parent) {
            const Node& n = t[a];
            const auto v = static_cast<std::size_t>(n.var);
            if (n.left == child)
                r.hi[v] = std::min(r.hi[v], n.cut - 1);
            else
                r.lo[v] = std::max(r.lo[v], n.cut + 1);
        }
        return r;
    }

    static Range restrict(const Range& r, int var, int cut, bool left) {
        Range out = r;
        const auto v = static_cast<std::size_t>(var);
        if (left)
            out.hi[v] = std::min(out.hi[v], cut - 1);
        else
            out.lo[v] = std::max(out.lo[v], cut + 1);
        return out;
    }

    // Picks a variable uniformly among those with cuts left, then a cut. The
    // proposal matches the uniform rule prior, so it cancels from every ratio.
    void draw_rule(const Range& r, int& var, int& cut) {
        const int nv = r.vars();
        std::size_t pick = rng_.index(static_cast<std::size_t>(nv));
        for (std::size_t v = 0; v < p_; ++v) {
            if (r.lo[v] > r.hi[v]) continue;
            if (pick-- == 0) {
                var = static_cast<int>(v);
                const int width = r.hi[v] - r.lo[v] + 1;
                cut = r.lo[v] + static_cast<int>(rng_.index(static_cast<std::size_t>(width)));
                return;
            }
        }
        throw Error("no admissible split rule");
    }

    bool growable(const Tree& t, int k) const {
        return t[k].alive && t[k].leaf() && cnt_[static_cast<std::size_t>(k)] >= 2.0 * cfg_.min_leaf_obs &&
               range_of(t, k).any();
    }

    void step(std::size_t j) {
        Tree& t = trees_[j];
        auto& leaf_of = leaf_of_[j];
        std::span<double> tree_fit(fit_.data() + j * n_, n_);
        kernels::partial_residual(z_, total_, tree_fit, resid_);

        cnt_.assign(t.nodes.size(), 0.0);
        sum_.assign(t.nodes.size(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto k = static_cast<std::size_t>(leaf_of[i]);
            cnt_[k] += 1.0;
            sum_[k] += resid_[i];
        }

        const double u = rng_.uniform();
        if (t.root_only() || u < cfg_.p_grow)
            grow(t, leaf_of);
        else if (u < cfg_.p_grow + cfg_.p_prune)
            prune(t, leaf_of);
        else
            change(t, leaf_of);

        for (std::size_t k = 0; k < t.nodes.size(); ++k) {
            Node& nd = t.nodes[k];
            if (!nd.alive || !nd.leaf()) continue;
            const double a = 1.0 + cnt_[k] * sigma2_;
            nd.mu = sigma2_ * sum_[k] / a + std::sqrt(sigma2_ / a) * rng_.normal();
        }
        for (std::size_t i = 0; i < n_; ++i) fresh_[i] = t[leaf_of[i]].mu;
        kernels::apply_delta(total_, fresh_, tree_fit);
        std::copy(fresh_.begin(), fresh_.end(), tree_fit.begin());
    }

    // Left-child count and residual sum for splitting leaf k at (var, cut).
    void split_stats(const std::vector<int>& leaf_of, int k, int var, int cut, double& nl,
                     double& sl) const {
        nl = sl = 0.0;
        const int* rank = rank_.data() + static_cast<std::size_t>(var) * n_;
        for (std::size_t i = 0; i < n_; ++i)
            if (leaf_of[i] == k && rank[i] <= cut) {
                nl += 1.0;
                sl += resid_[i];
            }
    }

    void ensure_stats(const Tree& t) {
        cnt_.resize(t.nodes.size(), 0.0);
        sum_.resize(t.nodes.size(), 0.0);
    }

    void grow(Tree& t, std::vector<int>& leaf_of) {
        std::vector<int> cand;
        for (std::size_t k = 0; k < t.nodes.size(); ++k)
            if (growable(t, static_cast<int>(k))) cand.push_back(static_cast<int>(k));
        if (cand.empty()) return;
        const int k = cand[rng_.index(cand.size())];
        const Range r = range_of(t, k);
        int var = -1, cut = -1;
        draw_rule(r, var, cut);

        double nl, sl;
        split_stats(leaf_of, k, var, cut, nl, sl);
        const double n = cnt_[static_cast<std::size_t>(k)], s = sum_[static_cast<std::size_t>(k)];
        const double nr = n - nl, sr = s - sl;
        const auto min_obs = static_cast<double>(cfg_.min_leaf_obs);
        if (nl < min_obs || nr < min_obs) return;

        const int d = t[k].depth;
        const double ps = split_prior_prob(cfg_, d);
        const double pl = psplit(d + 1, restrict(r, var, cut, true));
        const double pr = psplit(d + 1, restrict(r, var, cut, false));

        int nog = 0;
        for (std::size_t q = 0; q < t.nodes.size(); ++q)
            if (t.nodes[q].alive && t.is_nog(static_cast<int>(q))) ++nog;
        const int parent = t[k].parent;
        const int nog_after = nog + 1 - (parent >= 0 && t.is_nog(parent) ? 1 : 0);
        const double p_grow = t.root_only() ? 1.0 : cfg_.p_grow;

        const double log_ratio = std::log(ps) + std::log1p(-pl) + std::log1p(-pr) - std::log1p(-ps) +
                                 lml(nl, sl) + lml(nr, sr) - lml(n, s) +
                                 std::log(cfg_.p_prune / nog_after) -
                                 std::log(p_grow / static_cast<double>(cand.size()));
        if (std::log(rng_.uniform_open()) >= log_ratio) return;

        Node child;
        child.parent = k;
        child.depth = d + 1;
        const int l = t.add(child);
        const int rr = t.add(child);
        t[k].var = var;
        t[k].cut = cut;
        t[k].left = l;
        t[k].right = rr;
        ensure_stats(t);
        cnt_[static_cast<std::size_t>(l)] = nl;
        sum_[static_cast<std::size_t>(l)] = sl;
        cnt_[static_cast<std::size_t>(rr)] = nr;
        sum_[static_cast<std::size_t>(rr)] = sr;
        cnt_[static_cast<std::size_t>(k)] = sum_[static_cast<std::size_t>(k)] = 0.0;
        const int* rank = rank_.data() + static_cast<std::size_t>(var) * n_;
        for (std::size_t i = 0; i < n_; ++i)
            if (leaf_of[i] == k) leaf_of[i] = rank[i] <= cut ? l : rr;
    }

    void prune(Tree& t, std::vector<int>& leaf_of) {
        std::vector<int> nogs;
        for (std::size_t q = 0; q < t.nodes.size(); ++q)
            if (t.nodes[q].alive && t.is_nog(static_cast<int>(q))) nogs.push_back(static_cast<int>(q));
        const int k = nogs[rng_.index(nogs.size())];
        const int l = t[k].left, r = t[k].right;
        const auto L = static_cast<std::size_t>(l), R = static_cast<std::size_t>(r);
        const double nl = cnt_[L], sl = sum_[L], nr = cnt_[R], sr = sum_[R];

        const Range range = range_of(t, k);
        const int d = t[k].depth;
        const double ps = split_prior_prob(cfg_, d);
        const double pl = psplit(d + 1, restrict(range, t[k].var, t[k].cut, true));
        const double pr = psplit(d + 1, restrict(range, t[k].var, t[k].cut, false));

        // Reverse move: grow k back in the pruned tree.
        int growable_after = 0;
        for (std::size_t q = 0; q < t.nodes.size(); ++q) {
            const int qi = static_cast<int>(q);
            if (qi == l || qi == r) continue;
            if (qi == k) {
                growable_after += nl + nr >= 2.0 * cfg_.min_leaf_obs;
                continue;
            }
            growable_after += growable(t, qi);
        }
        const bool root_after = k == 0;
        const double p_grow_after = root_after ? 1.0 : cfg_.p_grow;

        const double log_ratio = std::log1p(-ps) - std::log(ps) - std::log1p(-pl) - std::log1p(-pr) +
                                 lml(nl + nr, sl + sr) - lml(nl, sl) - lml(nr, sr) +
                                 std::log(p_grow_after / growable_after) -
                                 std::log(cfg_.p_prune / static_cast<double>(nogs.size()));
        if (std::log(rng_.uniform_open()) >= log_ratio) return;

        t.remove(l);
        t.remove(r);
        t[k].var = t[k].cut = t[k].left = t[k].right = -1;
        cnt_[static_cast<std::size_t>(k)] = nl + nr;
        sum_[static_cast<std::size_t>(k)] = sl + sr;
        cnt_[L] = cnt_[R] = sum_[L] = sum_[R] = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            if (leaf_of[i] == l || leaf_of[i] == r) leaf_of[i] = k;
    }

    void change(Tree& t, std::vector<int>& leaf_of) {
        std::vector<int> nogs;
        for (std::size_t q = 0; q < t.nodes.size(); ++q)
            if (t.nodes[q].alive && t.is_nog(static_cast<int>(q))) nogs.push_back(static_cast<int>(q));
        const int k = nogs[rng_.index(nogs.size())];
        const int l = t[k].left, r = t[k].right;
        const auto L = static_cast<std::size_t>(l), R = static_cast<std::size_t>(r);
        const Range range = range_of(t, k);
        int var = -1, cut = -1;
        draw_rule(range, var, cut);

        const double n = cnt_[L] + cnt_[R], s = sum_[L] + sum_[R];
        double nl = 0.0, sl = 0.0;
        const int* rank = rank_.data() + static_cast<std::size_t>(var) * n_;
        for (std::size_t i = 0; i < n_; ++i)
            if ((leaf_of[i] == l || leaf_of[i] == r) && rank[i] <= cut) {
                nl += 1.0;
                sl += resid_[i];
            }
        const double nr = n - nl, sr = s - sl;
        const auto min_obs = static_cast<double>(cfg_.min_leaf_obs);
        if (nl < min_obs || nr < min_obs) return;

        const int d = t[k].depth;
        const double old_prior =
            std::log1p(-psplit(d + 1, restrict(range, t[k].var, t[k].cut, true))) +
            std::log1p(-psplit(d + 1, restrict(range, t[k].var, t[k].cut, false)));
        const double new_prior = std::log1p(-psplit(d + 1, restrict(range, var, cut, true))) +
                                 std::log1p(-psplit(d + 1, restrict(range, var, cut, false)));
        const double log_ratio = new_prior - old_prior + lml(nl, sl) + lml(nr, sr) -
                                 lml(cnt_[L], sum_[L]) - lml(cnt_[R], sum_[R]);
        if (std::log(rng_.uniform_open()) >= log_ratio) return;

        t[k].var = var;
        t[k].cut = cut;
        cnt_[L] = nl;
        sum_[L] = sl;
        cnt_[R] = nr;
        sum_[R] = sr;
        for (std::size_t i = 0; i < n_; ++i)
            if (leaf_of[i] == l || leaf_of[i] == r) leaf_of[i] = rank[i] <= cut ? l : r;
    }

    // Albert-Chib step on z~ = z - offset.
    void update_latent() {
        for (std::size_t i = 0; i < n_; ++i) {
            const double g = total_[i];
            z_[i] = y_[i] ? g + rng_.normal_above(-offset_ - g) : g - rng_.normal_above(g + offset_);
        }
    }

    ForestDraw snapshot() const {
        ForestDraw out;
        out.roots.reserve(trees_.size());
        for (const Tree& t : trees_) {
            out.roots.push_back(static_cast<std::uint32_t>(out.nodes.size()));
            flatten(t, 0, out.nodes);
        }
        return out;
    }

    static void flatten(const Tree& t, int k, std::vector<FlatNode>& out) {
        const std::size_t self = out.size();
        out.push_back({t[k].var, t[k].cut, -1, -1, t[k].mu});
        if (t[k].leaf()) return;
        out[self].left = static_cast<std::int32_t>(out.size());
        flatten(t, t[k].left, out);
        out[self].right = static_cast<std::int32_t>(out.size());
        flatten(t, t[k].right, out);
    }

    const BartConfig& cfg_;
    std::size_t n_, p_;
    const BinaryVector& y_;
    Rng rng_;
    std::vector<std::vector<double>> cuts_;
    std::vector<int> rank_;  // column-major ranks into the distinct values
    std::vector<int> ncut_;
    double offset_ = 0.0;
    double sigma2_ = 0.0;
    std::vector<Tree> trees_;
    std::vector<double> fit_;
    std::vector<std::vector<int>> leaf_of_;
    std::vector<double> total_, z_, resid_, fresh_;
    std::vector<double> cnt_, sum_;
};

}  // namespace

ProbitForest sample_probit_forest(const Matrix& inputs, const BinaryVector& y,
                                  const BartConfig& config, std::uint64_t seed) {
    config.validate();
    if (inputs.rows() != y.size()) throw ParameterError("outcome length differs from row count");
    if (inputs.rows() < 2 * config.min_leaf_obs)
        throw InsufficientData("too few rows for the flexible model");
    if (inputs.cols() == 0) throw ParameterError("flexible model needs at least one input");
    for (auto v : y)
        if (v > 1) throw ParameterError("outcomes must be 0/1");
    return Sampler(inputs, y, config, seed).run();
}

}  // namespace itr
