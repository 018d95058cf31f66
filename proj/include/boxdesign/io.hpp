#pragma once

#include "boxdesign/analytics.hpp"
#include "boxdesign/model.hpp"
#include "boxdesign/packer.hpp"
#include "boxdesign/solver.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace boxdesign::io {

// Parse failure carrying the source name and 1-based line number.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), source_(source), line_(line) {}

    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::string source_;
    std::size_t line_;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> fields;
    std::size_t              start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

// Shortest text that parses back to the identical double.
inline std::string format_double(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw IoError("format_double: conversion failed");
    return std::string(buffer, end);
}

// Fixed 17 significant digits.
inline std::string format_double17(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

}  // namespace detail

/// Header-checked CSV table. Rows are addressed by column name.
class CsvTable {
  public:
    static CsvTable parse(std::istream& in, const std::string& source, const std::vector<std::string>& required) {
        CsvTable    table;
        table.source_ = source;
        std::string line;
        std::size_t line_no = 0;
        bool        have_header = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            if (detail::trim(line).empty()) continue;
            auto fields = detail::split(line);
            if (!have_header) {
                table.header_ = std::move(fields);
                for (std::size_t c = 0; c < table.header_.size(); ++c) table.column_[table.header_[c]] = c;
                for (const auto& name : required) {
                    if (!table.column_.count(name)) throw ParseError(source, line_no, "missing column '" + name + "'");
                }
                have_header = true;
                continue;
            }
            if (fields.size() != table.header_.size()) {
                throw ParseError(source, line_no,
                                 "expected " + std::to_string(table.header_.size()) + " fields, found " +
                                     std::to_string(fields.size()));
            }
            table.rows_.push_back(std::move(fields));
            table.lines_.push_back(line_no);
        }
        if (!have_header) throw ParseError(source, 1, "missing header row");
        return table;
    }

    static CsvTable read(const std::string& path, const std::vector<std::string>& required) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "'");
        return parse(in, path, required);
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
    [[nodiscard]] const std::vector<std::string>& row(std::size_t r) const { return rows_.at(r); }
    [[nodiscard]] std::size_t line(std::size_t r) const { return lines_.at(r); }

    [[nodiscard]] const std::string& text(std::size_t r, const std::string& column) const {
        return rows_.at(r).at(column_.at(column));
    }

    [[nodiscard]] double number(std::size_t r, const std::string& column) const {
        const auto& field = text(r, column);
        double      value = 0.0;
        auto [ptr, ec]    = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
            throw ParseError(source_, lines_.at(r), "column '" + column + "': not a number '" + field + "'");
        }
        return value;
    }

    [[nodiscard]] std::size_t count(std::size_t r, const std::string& column) const {
        const auto& field = text(r, column);
        long long   value = 0;
        auto [ptr, ec]    = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
            throw ParseError(source_, lines_.at(r), "column '" + column + "': not an integer '" + field + "'");
        }
        if (value < 1) throw ParseError(source_, lines_.at(r), "column '" + column + "': must be >= 1");
        return static_cast<std::size_t>(value);
    }

    // Runs `fn` and rethrows model validation errors with this row's location.
    template <typename Fn>
    auto at_row(std::size_t r, Fn&& fn) const {
        try {
            return fn();
        } catch (const ValidationError& e) {
            throw ParseError(source_, lines_.at(r), e.what());
        }
    }

  private:
    std::string                                  source_;
    std::vector<std::string>                     header_;
    std::unordered_map<std::string, std::size_t> column_;
    std::vector<std::vector<std::string>>        rows_;
    std::vector<std::size_t>                     lines_;
};

// boxes.csv: box_id,length,depth,height,max_weight
inline std::vector<BoxType> parse_boxes(std::istream& in, const std::string& source = "boxes.csv") {
    const auto table = CsvTable::parse(in, source, {"box_id", "length", "depth", "height", "max_weight"});
    std::vector<BoxType> boxes;
    for (std::size_t r = 0; r < table.size(); ++r) {
        boxes.push_back(table.at_row(r, [&] {
            return BoxType(table.text(r, "box_id"),
                           {table.number(r, "length"), table.number(r, "depth"), table.number(r, "height")},
                           table.number(r, "max_weight"));
        }));
    }
    return boxes;
}

inline std::vector<BoxType> read_boxes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_boxes(in, path);
}

inline void write_boxes(std::ostream& out, std::span<const BoxType> boxes) {
    out << "box_id,length,depth,height,max_weight\n";
    for (const auto& box : boxes) {
        out << box.id() << ',' << detail::format_double(box.length()) << ',' << detail::format_double(box.depth()) << ','
            << detail::format_double(box.height()) << ',' << detail::format_double(box.max_weight()) << '\n';
    }
}

using SkuCatalog = std::map<std::string, Item>;

// skus.csv: sku_id,length,depth,height,weight
inline SkuCatalog parse_skus(std::istream& in, const std::string& source = "skus.csv") {
    const auto table = CsvTable::parse(in, source, {"sku_id", "length", "depth", "height", "weight"});
    SkuCatalog catalog;
    for (std::size_t r = 0; r < table.size(); ++r) {
        Item item = table.at_row(r, [&] {
            return Item(table.text(r, "sku_id"),
                        {table.number(r, "length"), table.number(r, "depth"), table.number(r, "height")},
                        table.number(r, "weight"));
        });
        const auto id = item.sku_id();
        if (!catalog.emplace(id, std::move(item)).second) {
            throw ParseError(source, table.line(r), "duplicate sku_id '" + id + "'");
        }
    }
    return catalog;
}

inline SkuCatalog read_skus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_skus(in, path);
}

/// orders.csv: order_id,sku_id,quantity. Lines of one order may be scattered;
/// orders come out in order of first appearance.
inline std::vector<Order> parse_orders(std::istream& in, const SkuCatalog& skus, const std::string& source = "orders.csv") {
    const auto table = CsvTable::parse(in, source, {"order_id", "sku_id", "quantity"});
    std::vector<std::string>                                  ids;
    std::unordered_map<std::string, std::vector<OrderLine>>   lines;
    for (std::size_t r = 0; r < table.size(); ++r) {
        const auto& order_id = table.text(r, "order_id");
        const auto& sku_id   = table.text(r, "sku_id");
        if (order_id.empty()) throw ParseError(source, table.line(r), "empty order_id");
        const auto sku = skus.find(sku_id);
        if (sku == skus.end()) throw ParseError(source, table.line(r), "unknown sku_id '" + sku_id + "'");
        auto [slot, inserted] = lines.try_emplace(order_id);
        if (inserted) ids.push_back(order_id);
        slot->second.push_back(OrderLine{sku->second, table.count(r, "quantity")});
    }
    std::vector<Order> orders;
    orders.reserve(ids.size());
    for (auto& id : ids) orders.emplace_back(id, std::move(lines.at(id)));
    return orders;
}

inline std::vector<Order> read_orders(const std::string& path, const SkuCatalog& skus) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_orders(in, skus, path);
}

// Cost matrix CSV: header "box_id,<id_0>,...", then one "<id_i>,c_i0,..." row per substitute.
// Values use 17 significant digits so a round trip is bit-exact.
inline void write_cost_matrix(std::ostream& out, const CostMatrix& cost, const std::vector<std::string>& row_ids,
                              const std::vector<std::string>& col_ids) {
    if (row_ids.size() != cost.rows() || col_ids.size() != cost.cols()) {
        throw IoError("write_cost_matrix: label count does not match matrix shape");
    }
    out << "box_id";
    for (const auto& id : col_ids) out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < cost.rows(); ++i) {
        out << row_ids[i];
        for (double value : cost.row(i)) out << ',' << detail::format_double17(value);
        out << '\n';
    }
}

struct LabeledMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    CostMatrix               cost;
};

inline LabeledMatrix parse_cost_matrix(std::istream& in, const std::string& source = "costs.csv") {
    LabeledMatrix       result;
    std::string         line;
    std::size_t         line_no = 0;
    std::vector<double> values;
    bool                have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split(line);
        if (!have_header) {
            if (fields.empty() || fields[0] != "box_id") throw ParseError(source, line_no, "missing column 'box_id'");
            result.col_ids.assign(fields.begin() + 1, fields.end());
            if (result.col_ids.empty()) throw ParseError(source, line_no, "no columns");
            have_header = true;
            continue;
        }
        if (fields.size() != result.col_ids.size() + 1) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(result.col_ids.size() + 1) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        result.row_ids.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(fields[c].data(), fields[c].data() + fields[c].size(), value);
            if (ec != std::errc{} || ptr != fields[c].data() + fields[c].size() || fields[c].empty()) {
                throw ParseError(source, line_no, "not a number '" + fields[c] + "'");
            }
            values.push_back(value);
        }
    }
    if (!have_header) throw ParseError(source, 1, "missing header row");
    if (result.row_ids.empty()) throw ParseError(source, line_no, "no matrix rows");
    result.cost = CostMatrix(result.row_ids.size(), result.col_ids.size(), std::move(values));
    return result;
}

inline LabeledMatrix read_cost_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_cost_matrix(in, path);
}

// weights.csv: box_id,ev,w
inline void write_weights(std::ostream& out, const CandidatePool& pool, const WeightVector& weights) {
    out << "box_id,ev,w\n";
    for (std::size_t j = 0; j < pool.size(); ++j) {
        out << pool[j].id() << ',' << detail::format_double17(weights.ev[j]) << ','
            << detail::format_double17(weights.w[j]) << '\n';
    }
}

struct LabeledWeights {
    std::vector<std::string> ids;
    WeightVector             weights;
};

inline LabeledWeights parse_weights(std::istream& in, const std::string& source = "weights.csv") {
    const auto     table = CsvTable::parse(in, source, {"box_id", "ev", "w"});
    LabeledWeights result;
    for (std::size_t r = 0; r < table.size(); ++r) {
        result.ids.push_back(table.text(r, "box_id"));
        result.weights.ev.push_back(table.number(r, "ev"));
        result.weights.w.push_back(table.number(r, "w"));
    }
    return result;
}

inline LabeledWeights read_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_weights(in, path);
}

/// selection.csv: rank,row_index,box_id,objective_after_step. The last column
/// is the objective of the first `rank` rows.
template <typename Real>
void write_selection(std::ostream& out, const SelectionProblem<Real>& problem, const Selection<Real>& selection,
                     const std::vector<std::string>& row_ids = {}) {
    out << "rank,row_index,box_id,objective_after_step\n";
    for (std::size_t r = 0; r < selection.rows.size(); ++r) {
        const auto prefix = std::span<const std::size_t>(selection.rows.data(), r + 1);
        out << (r + 1) << ',' << selection.rows[r] << ','
            << (row_ids.empty() ? std::string() : row_ids.at(selection.rows[r])) << ','
            << detail::format_double17(static_cast<double>(objective(problem, prefix))) << '\n';
    }
}

/// One JSON object per placement: order_id, box_instance, box_id, sku_id, origin, oriented_dims.
inline void write_trace(std::ostream& out, const PackingResult& result) {
    for (std::size_t b = 0; b < result.boxes.size(); ++b) {
        const auto& instance = result.boxes[b];
        for (const auto& placement : instance.placements) {
            nlohmann::ordered_json record;
            record["order_id"]      = result.order_id;
            record["box_instance"]  = b;
            record["box_id"]        = instance.box.id();
            record["sku_id"]        = result.items[placement.item_index].sku_id();
            record["origin"]        = placement.origin;
            record["oriented_dims"] = placement.oriented_dims;
            out << record.dump() << '\n';
        }
    }
    for (const auto& unpacked : result.unpacked) {
        nlohmann::ordered_json record;
        record["order_id"] = result.order_id;
        record["sku_id"]   = result.items[unpacked.item_index].sku_id();
        record["unpacked"] = to_string(unpacked.reason);
        out << record.dump() << '\n';
    }
}

}  // namespace boxdesign::io
