#include "mnemo/sheaf.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mnemo::sheaf {

RestrictionMap RestrictionMap::diagonal(Vector diag)
{
    if (!vec::all_finite(diag)) throw std::invalid_argument("RestrictionMap: non-finite entry");
    return RestrictionMap(Kind::Diagonal, std::move(diag));
}

RestrictionMap RestrictionMap::dense(std::size_t dim, Vector row_major)
{
    if (row_major.size() != dim * dim) throw DimensionMismatch(dim * dim, row_major.size());
    if (!vec::all_finite(row_major)) throw std::invalid_argument("RestrictionMap: non-finite entry");
    return RestrictionMap(Kind::Dense, std::move(row_major));
}

Vector RestrictionMap::apply(std::span<const double> x) const
{
    switch (kind_) {
    case Kind::Identity: return Vector(x.begin(), x.end());
    case Kind::Diagonal: {
        vec::require_same_dim(data_, x);
        Vector out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = data_[i] * x[i];
        return out;
    }
    case Kind::Dense: {
        const std::size_t n = x.size();
        if (data_.size() != n * n) throw DimensionMismatch(data_.size(), n * n);
        Vector out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i] += data_[i * n + j] * x[j];
        return out;
    }
    }
    return {};
}

double RestrictionMap::entry(std::size_t i, std::size_t j, std::size_t dim) const
{
    switch (kind_) {
    case Kind::Identity: return i == j ? 1.0 : 0.0;
    case Kind::Diagonal: return i == j ? data_.at(i) : 0.0;
    case Kind::Dense: return data_.at(i * dim + j);
    }
    return 0.0;
}

ContextSheaf::ContextSheaf(std::size_t stalk_dim) : dim_(stalk_dim)
{
    if (stalk_dim == 0) throw std::invalid_argument("ContextSheaf: stalk dimension must be positive");
}

std::size_t ContextSheaf::add_vertex(std::string label)
{
    labels_.push_back(std::move(label));
    section_.emplace_back();
    return labels_.size() - 1;
}

void ContextSheaf::add_edge(std::size_t u, std::size_t v, RestrictionMap rho)
{
    if (u >= labels_.size() || v >= labels_.size())
        throw std::out_of_range("ContextSheaf: edge endpoint is not a vertex");
    if (rho.kind() == RestrictionMap::Kind::Diagonal && rho.data().size() != dim_)
        throw DimensionMismatch(dim_, rho.data().size());
    if (rho.kind() == RestrictionMap::Kind::Dense && rho.data().size() != dim_ * dim_)
        throw DimensionMismatch(dim_ * dim_, rho.data().size());
    edges_.push_back(SheafEdge{u, v, std::move(rho)});
}

void ContextSheaf::set_section(std::size_t vertex, Vector value)
{
    if (value.size() != dim_) throw DimensionMismatch(dim_, value.size());
    if (!vec::all_finite(value)) throw std::invalid_argument("ContextSheaf: non-finite section value");
    section_.at(vertex) = std::move(value);
}

std::vector<Vector> coboundary(const ContextSheaf& s)
{
    std::vector<Vector> out;
    out.reserve(s.edge_count());
    for (const auto& e : s.edges()) {
        const auto& fu = s.section(e.u);
        const auto& fv = s.section(e.v);
        if (!fu || !fv) throw Error("coboundary: section missing on vertex");
        Vector d = e.rho.apply(*fu);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= (*fv)[i];
        out.push_back(std::move(d));
    }
    return out;
}

double contradiction_score(const ContextSheaf& s)
{
    if (s.edge_count() == 0) return 0.0;
    double num = 0.0;
    for (const auto& d : coboundary(s)) num += vec::squared_norm(d);
    double den = 0.0;
    for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        const auto& f = s.section(v);
        if (!f) throw Error("contradiction_score: section missing on vertex");
        den += vec::squared_norm(*f);
    }
    return num / (den + kContradictionEps);
}

namespace {

using Eigen::MatrixXd;

Eigen::VectorXd singular_values(const MatrixXd& m)
{
    if (m.rows() == 0 || m.cols() == 0) return {};
    Eigen::BDCSVD<MatrixXd> svd(m);
    return svd.singularValues();
}

std::size_t rank_from(const std::vector<Eigen::VectorXd>& blocks, const std::vector<std::size_t>& mult)
{
    double smax = 0.0;
    for (const auto& b : blocks)
        if (b.size() > 0) smax = std::max(smax, b.maxCoeff());
    if (smax == 0.0) return 0;
    const double tol = 1e-10 * smax;
    std::size_t rank = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (Eigen::Index k = 0; k < blocks[i].size(); ++k)
            if (blocks[i][k] > tol) rank += mult[i];
    return rank;
}

} // namespace

std::size_t h1_dimension(const ContextSheaf& s)
{
    const std::size_t ne = s.edge_count(), nv = s.vertex_count(), d = s.stalk_dim();
    if (ne == 0) return 0;

    bool all_identity = true, any_dense = false;
    for (const auto& e : s.edges()) {
        all_identity = all_identity && e.rho.kind() == RestrictionMap::Kind::Identity;
        any_dense = any_dense || e.rho.kind() == RestrictionMap::Kind::Dense;
    }

    std::size_t rank = 0;
    if (!any_dense) {
        // Diagonal maps never mix coordinates, so delta_0 is block diagonal
        // with one weighted incidence matrix per coordinate.
        const std::size_t distinct = all_identity ? 1 : d;
        std::vector<Eigen::VectorXd> blocks;
        std::vector<std::size_t> mult;
        for (std::size_t k = 0; k < distinct; ++k) {
            MatrixXd b = MatrixXd::Zero(static_cast<Eigen::Index>(ne), static_cast<Eigen::Index>(nv));
            for (std::size_t r = 0; r < ne; ++r) {
                const auto& e = s.edges()[r];
                b(r, e.u) += e.rho.entry(k, k, d);
                b(r, e.v) -= 1.0;
            }
            blocks.push_back(singular_values(b));
            mult.push_back(all_identity ? d : 1);
        }
        rank = rank_from(blocks, mult);
    } else {
        MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(ne * d), static_cast<Eigen::Index>(nv * d));
        for (std::size_t r = 0; r < ne; ++r) {
            const auto& e = s.edges()[r];
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) m(r * d + i, e.u * d + j) += e.rho.entry(i, j, d);
                m(r * d + i, e.v * d + i) -= 1.0;
            }
        }
        rank = rank_from({singular_values(m)}, {1});
    }
    return ne * d - rank;
}

ConsistencyReport consistency_report(const ContextSheaf& s)
{
    ConsistencyReport r;
    r.kappa = contradiction_score(s);
    r.h1_dim = h1_dimension(s);
    const auto delta = coboundary(s);
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const double n = vec::norm(delta[i]);
        if (n > 1e-12) {
            const auto& e = s.edges()[i];
            r.offending_edges.push_back({i, s.label(e.u), s.label(e.v), n});
        }
    }
    std::stable_sort(r.offending_edges.begin(), r.offending_edges.end(),
                     [](const auto& a, const auto& b) { return a.discrepancy > b.discrepancy; });
    return r;
}

FactSheaf build_fact_sheaf(std::span<const FactObservation> facts, std::size_t stalk_dim)
{
    std::map<std::string, std::vector<std::size_t>> by_context;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        if (facts[i].embedding.size() != stalk_dim) throw DimensionMismatch(stalk_dim, facts[i].embedding.size());
        by_context[facts[i].context].push_back(i);
    }
    FactSheaf out{ContextSheaf(stalk_dim), {}};
    for (const auto& [label, idx] : by_context) {
        const std::size_t v = out.sheaf.add_vertex(label);
        Vector mean(stalk_dim, 0.0);
        for (std::size_t i : idx)
            for (std::size_t k = 0; k < stalk_dim; ++k) mean[k] += facts[i].embedding[k];
        for (double& x : mean) x /= static_cast<double>(idx.size());
        out.sheaf.set_section(v, std::move(mean));
        out.members.push_back(idx);
    }
    for (std::size_t u = 0; u < out.sheaf.vertex_count(); ++u)
        for (std::size_t v = u + 1; v < out.sheaf.vertex_count(); ++v) out.sheaf.add_edge(u, v);
    return out;
}

namespace {

double distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Timestamp oldest_time(std::span<const FactObservation> facts, const std::vector<std::size_t>& idx)
{
    Timestamp t = facts[idx.front()].time;
    for (std::size_t i : idx) t = std::min(t, facts[i].time);
    return t;
}

/// Picks the memory to supersede given the anchor (newest) context vertex.
std::optional<SupersedesDirective> pick_target(const FactSheaf& fs, std::span<const FactObservation> facts,
                                               std::size_t anchor, MemoryId newer, double kappa)
{
    const auto delta = coboundary(fs.sheaf);
    std::optional<std::size_t> best;
    double best_norm = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const auto& e = fs.sheaf.edges()[i];
        if (e.u != anchor && e.v != anchor) continue;
        const std::size_t other = e.u == anchor ? e.v : e.u;
        const double n = vec::norm(delta[i]);
        if (n <= 1e-12) continue;
        if (!best || n > best_norm ||
            (n == best_norm && oldest_time(facts, fs.members[other]) < oldest_time(facts, fs.members[*best]))) {
            best = other;
            best_norm = n;
        }
    }
    if (!best) return std::nullopt;

    const Vector& anchor_value = *fs.sheaf.section(anchor);
    const FactObservation* target = nullptr;
    double target_dist = -1.0;
    for (std::size_t i : fs.members[*best]) {
        const auto& f = facts[i];
        const double dd = distance(anchor_value, f.embedding);
        if (!target || dd > target_dist ||
            (dd == target_dist && (f.time < target->time || (f.time == target->time && f.memory < target->memory)))) {
            target = &f;
            target_dist = dd;
        }
    }
    return SupersedesDirective{newer, target->memory, kappa, best_norm};
}

std::size_t vertex_of(const FactSheaf& fs, const std::string& context)
{
    for (std::size_t v = 0; v < fs.sheaf.vertex_count(); ++v)
        if (fs.sheaf.label(v) == context) return v;
    throw Error("context not in sheaf: " + context);
}

} // namespace

FactCheck check_new_fact(std::span<const FactObservation> existing, const FactObservation& new_fact,
                         std::size_t stalk_dim, double tau)
{
    if (new_fact.embedding.size() != stalk_dim) throw DimensionMismatch(stalk_dim, new_fact.embedding.size());
    std::vector<FactObservation> all(existing.begin(), existing.end());
    all.push_back(new_fact);
    const FactSheaf fs = build_fact_sheaf(all, stalk_dim);

    FactCheck out;
    out.report = consistency_report(fs.sheaf);
    if (out.report.kappa > tau)
        out.directive = pick_target(fs, all, vertex_of(fs, new_fact.context), new_fact.memory, out.report.kappa);
    return out;
}

Resolution resolve_key(std::span<const FactObservation> facts, std::size_t stalk_dim, double tau)
{
    Resolution res;
    std::vector<FactObservation> remaining(facts.begin(), facts.end());
    if (remaining.empty()) return res;

    const auto newest = std::max_element(remaining.begin(), remaining.end(), [](const auto& a, const auto& b) {
        return a.time != b.time ? a.time < b.time : a.memory < b.memory;
    });
    const std::string anchor_ctx = newest->context;
    const MemoryId newer = newest->memory;

    FactSheaf fs = build_fact_sheaf(remaining, stalk_dim);
    res.initial = consistency_report(fs.sheaf);
    ConsistencyReport current = res.initial;
    while (current.kappa > tau) {
        const auto directive = pick_target(fs, remaining, vertex_of(fs, anchor_ctx), newer, current.kappa);
        if (!directive) break;
        res.directives.push_back(*directive);
        std::erase_if(remaining, [&](const auto& f) { return f.memory == directive->older; });
        fs = build_fact_sheaf(remaining, stalk_dim);
        current = consistency_report(fs.sheaf);
    }
    res.final = current;
    return res;
}

} // namespace mnemo::sheaf
