#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gauge/rational.hpp"

namespace gauge {

using Point = std::vector<double>;

/// Raised when a construction needs finer cells than its depth budget allows.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Nondegenerate closed box in R^n with exact rational endpoints.
class Box {
public:
    Box(std::vector<Rational> lo, std::vector<Rational> hi);

    static Box interval(const Rational& lo, const Rational& hi);
    static Box cube(std::size_t dim, const Rational& lo, const Rational& hi);
    /// Accepts "[0,1]", "[0,1/2]x[-1,1]" or the JSON form "[[\"0\",\"1\"],[\"0\",\"2\"]]".
    static Box parse(std::string_view text);

    [[nodiscard]] std::size_t dim() const { return lo_.size(); }
    [[nodiscard]] const Rational& lo(std::size_t axis) const { return lo_[axis]; }
    [[nodiscard]] const Rational& hi(std::size_t axis) const { return hi_[axis]; }
    [[nodiscard]] Rational side(std::size_t axis) const { return hi_[axis] - lo_[axis]; }

    /// Euclidean diameter.
    [[nodiscard]] double diameter() const;
    [[nodiscard]] double volume() const;
    [[nodiscard]] Rational exact_volume() const;

    [[nodiscard]] std::vector<Rational> exact_center() const;
    [[nodiscard]] Point center() const;
    [[nodiscard]] std::size_t corner_count() const { return std::size_t{1} << dim(); }
    /// Corner k takes hi on axis i when bit (dim-1-i) of k is set, so corners
    /// come out in lexicographic order.
    [[nodiscard]] std::vector<Rational> exact_corner(std::size_t k) const;
    [[nodiscard]] Point corner(std::size_t k) const;
    /// Center first, then the corners in lexicographic order.
    [[nodiscard]] std::vector<Point> tag_candidates() const;

    [[nodiscard]] bool contains(std::span<const double> x) const;
    [[nodiscard]] bool contains(std::span<const Rational> x) const;
    [[nodiscard]] bool contains(const Box& other) const;
    /// Intersection, or nullopt when it is empty or degenerate.
    [[nodiscard]] std::optional<Box> intersect(const Box& other) const;

    /// The 2^n halves obtained by bisecting every axis, ordered like corners.
    [[nodiscard]] std::vector<Box> bisect() const;

    [[nodiscard]] std::string str() const;
    [[nodiscard]] std::string to_json() const;

    friend bool operator==(const Box&, const Box&) = default;
    friend std::strong_ordering operator<=>(const Box& a, const Box& b);

private:
    std::vector<Rational> lo_;
    std::vector<Rational> hi_;
};

struct Partition {
    Box parent;
    std::vector<Box> cells;
};

struct TaggedCell {
    Box cell;
    Point tag;
};

struct TaggedPartition {
    Box parent;
    std::vector<TaggedCell> cells;

    [[nodiscard]] Partition untagged() const;
    [[nodiscard]] std::string to_json() const;
};

struct PartitionCheck {
    bool ok = false;
    std::string defect;
    /// A rational point inside the first overlap or gap (empty when ok).
    std::vector<Rational> witness;
};

/// Exact test that `cells` are nonoverlapping and cover `parent`.
/// Throws std::invalid_argument on a dimension mismatch.
PartitionCheck is_partition(const Box& parent, std::span<const Box> cells);

/// Strictly positive point function bounding admissible cell diameters.
class Gauge {
public:
    using Function = std::function<double(std::span<const double>)>;

    static Gauge constant(double value);
    static Gauge from_function(Function fn, std::string description);
    /// Piecewise constant on the dyadic cells of `root` at `depth`; points on
    /// shared faces take the minimum over adjacent cells, and cells without an
    /// entry fall back to `floor`.
    static Gauge piecewise_dyadic(Box root, int depth,
                                  std::map<std::vector<std::uint64_t>, double> values,
                                  double floor);

    /// Throws std::domain_error if the value is not strictly positive.
    double operator()(std::span<const double> x) const;
    double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }
    [[nodiscard]] const std::string& description() const { return description_; }

private:
    Gauge(Function fn, std::string description)
        : fn_(std::move(fn)), description_(std::move(description)) {}
    Function fn_;
    std::string description_;
};

/// True iff every tag lies in its cell and diam(cell) < gauge(tag). On failure
/// `first_violation` receives the offending cell index.
bool is_delta_fine(const TaggedPartition& partition, const Gauge& gauge,
                   std::size_t* first_violation = nullptr);

inline constexpr int kDefaultDepthBudget = 40;

/// Constructive Cousin lemma: bisects `box` until every cell admits a tag
/// among its center and corners with diam < gauge(tag). Throws BudgetExceeded
/// when a cell at `depth_budget` still has no admissible tag.
TaggedPartition cousin_partition(const Box& box, const Gauge& gauge,
                                 int depth_budget = kDefaultDepthBudget);

struct RandomFineOptions {
    /// Probability of stopping at a cell that already admits a tag.
    double stop_probability = 0.5;
    /// Extra random dyadic tag candidates tried per cell, besides center and corners.
    int random_tags = 2;
    int depth_budget = kDefaultDepthBudget;
};

/// Randomized delta-fine dyadic tagged partition; deterministic for a seed.
TaggedPartition random_fine_partition(const Box& box, const Gauge& gauge, std::uint64_t seed,
                                      const RandomFineOptions& options = {});

/// Visits each of the 2^k partitions of a 1-D box whose breakpoints are a
/// subset of the k interior grid points. The grid must be strictly increasing
/// and contain both endpoints of the box.
void for_each_partition(const Box& box, std::span<const Rational> grid,
                        const std::function<void(const Partition&)>& visit);
std::vector<Partition> enumerate_partitions(const Box& box, std::span<const Rational> grid);

/// Dyadic grid lo, lo + side/2^m, ..., hi of a 1-D box.
std::vector<Rational> dyadic_grid(const Box& box, int level);

/// Cell of the dyadic refinement of a root box, addressed by depth and
/// per-axis integer index.
struct DyadicCell {
    int depth = 0;
    std::vector<std::uint64_t> index;

    [[nodiscard]] Box to_box(const Box& root) const;
    [[nodiscard]] std::vector<DyadicCell> children() const;
    friend auto operator<=>(const DyadicCell&, const DyadicCell&) = default;
};

/// All dyadic cells of `root` at exactly `depth`, in lexicographic index order.
std::vector<DyadicCell> dyadic_cells(std::size_t dim, int depth);

}  // namespace gauge
