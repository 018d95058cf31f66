#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace boxdesign {

// Raised for any malformed input: bad dimensions, empty corpora, out-of-range parameters.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a ratio metric has a zero denominator (no boxes used, zero baseline).
class UndefinedMetricError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Three extents sorted descending: length >= depth >= height.
struct Dims {
    double length = 0.0;
    double depth  = 0.0;
    double height = 0.0;

    [[nodiscard]] double volume() const noexcept { return length * depth * height; }
    [[nodiscard]] std::array<double, 3> as_array() const noexcept { return {length, depth, height}; }

    friend bool operator==(const Dims&, const Dims&) = default;
    friend auto operator<=>(const Dims&, const Dims&) = default;
};

/// Validates three extents and returns them sorted descending.
///
/// `what` names the object being built and shows up in the error message,
/// e.g. "box 'B12': non-positive dimension height=0".
inline Dims canonicalize(std::array<double, 3> dims, const std::string& what = "dims") {
    static constexpr std::array<const char*, 3> kFieldNames{"length", "depth", "height"};
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const double value = dims[axis];
        if (!std::isfinite(value)) {
            std::ostringstream msg;
            msg << what << ": non-finite dimension " << kFieldNames[axis] << "=" << value;
            throw ValidationError(msg.str());
        }
        if (value <= 0.0) {
            std::ostringstream msg;
            msg << what << ": non-positive dimension " << kFieldNames[axis] << "=" << value;
            throw ValidationError(msg.str());
        }
    }
    std::sort(dims.begin(), dims.end(), std::greater<>());
    return Dims{dims[0], dims[1], dims[2]};
}

namespace detail {

inline double require_positive(double value, const std::string& what, const char* field) {
    if (!std::isfinite(value) && !(std::isinf(value) && value > 0.0)) {
        throw ValidationError(what + ": non-finite " + field);
    }
    if (!(value > 0.0)) {
        std::ostringstream msg;
        msg << what << ": non-positive " << field << "=" << value;
        throw ValidationError(msg.str());
    }
    return value;
}

}  // namespace detail

// A candidate shipping box. Walls have zero thickness, so the one triple is both inner and outer size.
class BoxType {
  public:
    BoxType(std::string id, std::array<double, 3> dims, double max_weight)
      : id_(std::move(id))
      , dims_(canonicalize(dims, "box '" + id_ + "'"))
      , max_weight_(detail::require_positive(max_weight, "box '" + id_ + "'", "max_weight")) {}

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] double length() const noexcept { return dims_.length; }
    [[nodiscard]] double depth() const noexcept { return dims_.depth; }
    [[nodiscard]] double height() const noexcept { return dims_.height; }
    [[nodiscard]] double max_weight() const noexcept { return max_weight_; }
    [[nodiscard]] double volume() const noexcept { return dims_.volume(); }

    friend bool operator==(const BoxType&, const BoxType&) = default;

  private:
    std::string id_;
    Dims        dims_;
    double      max_weight_;
};

class Item {
  public:
    Item(std::string sku_id, std::array<double, 3> dims, double weight)
      : sku_id_(std::move(sku_id))
      , dims_(canonicalize(dims, "sku '" + sku_id_ + "'"))
      , weight_(detail::require_positive(weight, "sku '" + sku_id_ + "'", "weight")) {
        if (!std::isfinite(weight_)) throw ValidationError("sku '" + sku_id_ + "': non-finite weight");
    }

    [[nodiscard]] const std::string& sku_id() const noexcept { return sku_id_; }
    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] double weight() const noexcept { return weight_; }
    [[nodiscard]] double volume() const noexcept { return dims_.volume(); }

    friend bool operator==(const Item&, const Item&) = default;

  private:
    std::string sku_id_;
    Dims        dims_;
    double      weight_;
};

struct OrderLine {
    Item        item;
    std::size_t quantity = 1;
};

class Order {
  public:
    Order(std::string order_id, std::vector<OrderLine> lines) : order_id_(std::move(order_id)), lines_(std::move(lines)) {
        if (lines_.empty()) throw ValidationError("order '" + order_id_ + "': no lines");
        for (const auto& line : lines_) {
            if (line.quantity < 1) {
                throw ValidationError("order '" + order_id_ + "': quantity must be >= 1 for sku '" +
                                      line.item.sku_id() + "'");
            }
        }
    }

    [[nodiscard]] const std::string& order_id() const noexcept { return order_id_; }
    [[nodiscard]] const std::vector<OrderLine>& lines() const noexcept { return lines_; }

    // One entry per physical unit, lines in input order, quantities unrolled.
    [[nodiscard]] std::vector<Item> expanded_items() const {
        std::vector<Item> items;
        for (const auto& line : lines_) {
            for (std::size_t copy = 0; copy < line.quantity; ++copy) items.push_back(line.item);
        }
        return items;
    }

    [[nodiscard]] std::size_t item_count() const noexcept {
        std::size_t count = 0;
        for (const auto& line : lines_) count += line.quantity;
        return count;
    }

    [[nodiscard]] double total_volume() const noexcept {
        double volume = 0.0;
        for (const auto& line : lines_) volume += line.item.volume() * static_cast<double>(line.quantity);
        return volume;
    }

  private:
    std::string            order_id_;
    std::vector<OrderLine> lines_;
};

// The n candidate box sizes, indexed 0..n-1.
class CandidatePool {
  public:
    explicit CandidatePool(std::vector<BoxType> boxes) : boxes_(std::move(boxes)) {
        if (boxes_.empty()) throw ValidationError("candidate pool: must contain at least one box");
        std::set<std::tuple<double, double, double, double>> seen;
        for (const auto& box : boxes_) {
            const auto key = std::make_tuple(box.length(), box.depth(), box.height(), box.max_weight());
            if (!seen.insert(key).second) {
                throw ValidationError("candidate pool: duplicate box size for '" + box.id() + "'");
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return boxes_.size(); }
    [[nodiscard]] const BoxType& operator[](std::size_t j) const { return boxes_[j]; }
    [[nodiscard]] const BoxType& at(std::size_t j) const { return boxes_.at(j); }
    [[nodiscard]] const std::vector<BoxType>& boxes() const noexcept { return boxes_; }
    [[nodiscard]] auto begin() const noexcept { return boxes_.begin(); }
    [[nodiscard]] auto end() const noexcept { return boxes_.end(); }

    // Position of the box with the given id, or size() when absent.
    [[nodiscard]] std::size_t index_of(const std::string& id) const noexcept {
        for (std::size_t j = 0; j < boxes_.size(); ++j) {
            if (boxes_[j].id() == id) return j;
        }
        return boxes_.size();
    }

  private:
    std::vector<BoxType> boxes_;
};

namespace detail {

inline std::string format_dim(double value) {
    std::ostringstream out;
    out << value;
    return out.str();
}

}  // namespace detail

/// Enumerates every box (a >= b >= c) whose sides are drawn from the grid
/// min_dim, min_dim + step, ..., <= max_dim. The pool size is C(g + 2, 3)
/// for a grid of g values. Ids are "LxDxH".
inline CandidatePool generate_candidate_pool(double min_dim, double max_dim, double step, double max_weight) {
    if (!std::isfinite(min_dim) || !std::isfinite(max_dim) || !std::isfinite(step)) {
        throw ValidationError("candidate grid: non-finite bound");
    }
    if (!(min_dim > 0.0)) throw ValidationError("candidate grid: min_dim must be > 0");
    if (!(step > 0.0)) throw ValidationError("candidate grid: step must be > 0");
    if (min_dim > max_dim) throw ValidationError("candidate grid: empty grid (min_dim > max_dim)");

    // Tolerate accumulated rounding in (max - min) / step.
    const auto grid_size = static_cast<std::size_t>(std::floor((max_dim - min_dim) / step + 1e-9)) + 1;
    std::vector<double> grid(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g) grid[g] = min_dim + static_cast<double>(g) * step;

    std::vector<BoxType> boxes;
    boxes.reserve(grid_size * (grid_size + 1) * (grid_size + 2) / 6);
    for (std::size_t a = 0; a < grid_size; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            for (std::size_t c = 0; c <= b; ++c) {
                std::string id = detail::format_dim(grid[a]) + "x" + detail::format_dim(grid[b]) + "x" +
                                 detail::format_dim(grid[c]);
                boxes.emplace_back(std::move(id), std::array{grid[a], grid[b], grid[c]}, max_weight);
            }
        }
    }
    return CandidatePool(std::move(boxes));
}

}  // namespace boxdesign
