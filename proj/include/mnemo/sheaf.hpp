#pragma once

// Cellular sheaf over a graph of memory contexts. Stalks are R^d, each edge
// carries a linear restriction map, and a section assigns one vector per
// vertex. The coboundary measures per-edge disagreement.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mnemo/common.hpp"

namespace mnemo::sheaf {

inline constexpr double kContradictionEps = 1e-9;
inline constexpr double kDefaultTau = 0.45;

class RestrictionMap {
  public:
    enum class Kind { Identity, Diagonal, Dense };

    static RestrictionMap identity() { return RestrictionMap(Kind::Identity, {}); }
    static RestrictionMap diagonal(Vector diag);
    /// Row-major dim x dim matrix.
    static RestrictionMap dense(std::size_t dim, Vector row_major);

    Kind kind() const { return kind_; }
    const Vector& data() const { return data_; }

    Vector apply(std::span<const double> x) const;
    /// Entry (i, j) of the map viewed as a dim x dim matrix.
    double entry(std::size_t i, std::size_t j, std::size_t dim) const;

  private:
    RestrictionMap(Kind k, Vector data) : kind_(k), data_(std::move(data)) {}

    Kind kind_;
    Vector data_;
};

struct SheafEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    RestrictionMap rho = RestrictionMap::identity();
};

class ContextSheaf {
  public:
    explicit ContextSheaf(std::size_t stalk_dim);

    std::size_t stalk_dim() const { return dim_; }

    std::size_t add_vertex(std::string label);
    void add_edge(std::size_t u, std::size_t v, RestrictionMap rho = RestrictionMap::identity());
    void set_section(std::size_t vertex, Vector value);

    std::size_t vertex_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<SheafEdge>& edges() const { return edges_; }
    const std::string& label(std::size_t v) const { return labels_.at(v); }
    const std::optional<Vector>& section(std::size_t v) const { return section_.at(v); }

  private:
    std::size_t dim_;
    std::vector<std::string> labels_;
    std::vector<std::optional<Vector>> section_;
    std::vector<SheafEdge> edges_;
};

/// (delta f)(u, v) = rho_{u->v}(f(u)) - f(v), one vector per edge in edge order.
/// Throws Error when a vertex has no section value.
std::vector<Vector> coboundary(const ContextSheaf& s);

/// kappa = |delta f|^2 / (|f|^2 + eps); 0 for an empty graph.
double contradiction_score(const ContextSheaf& s);

/// |E| d - rank(delta_0), with the context graph treated as a 1-complex.
std::size_t h1_dimension(const ContextSheaf& s);

struct OffendingEdge {
    std::size_t edge = 0;
    std::string u;
    std::string v;
    double discrepancy = 0.0;
};

struct ConsistencyReport {
    double kappa = 0.0;
    std::size_t h1_dim = 0;
    /// Edges with nonzero discrepancy, largest first.
    std::vector<OffendingEdge> offending_edges;
};

ConsistencyReport consistency_report(const ContextSheaf& s);

/// One fact embedding observed in a context.
struct FactObservation {
    std::string context;
    MemoryId memory = 0;
    Timestamp time = 0;
    Vector embedding;
};

struct SupersedesDirective {
    MemoryId newer = 0;
    MemoryId older = 0;
    double kappa = 0.0;
    double discrepancy = 0.0;
};

/// Complete context graph over the contexts present in `facts`, identity
/// maps, section = mean embedding per context. Vertices are sorted by label.
struct FactSheaf {
    ContextSheaf sheaf;
    std::vector<std::vector<std::size_t>> members; // fact indices per vertex
};

FactSheaf build_fact_sheaf(std::span<const FactObservation> facts, std::size_t stalk_dim);

struct FactCheck {
    ConsistencyReport report;
    std::optional<SupersedesDirective> directive;
};

/// Store-time check of a new fact against the existing facts that share its
/// key. Emits a SUPERSEDES directive when kappa > tau.
FactCheck check_new_fact(std::span<const FactObservation> existing, const FactObservation& new_fact,
                         std::size_t stalk_dim, double tau = kDefaultTau);

struct Resolution {
    ConsistencyReport initial;
    ConsistencyReport final;
    std::vector<SupersedesDirective> directives;
};

/// Background sweep of one fact key: repeatedly supersedes the memory most
/// discrepant with the newest context until kappa <= tau.
Resolution resolve_key(std::span<const FactObservation> facts, std::size_t stalk_dim,
                       double tau = kDefaultTau);

} // namespace mnemo::sheaf
