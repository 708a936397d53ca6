#include "gvfa/faults.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>

namespace gvfa::faults {

namespace {

void check_cell(std::size_t row, std::size_t col, std::size_t rows,
                std::size_t cols) {
    if (row >= rows || col >= cols) {
        throw std::domain_error("fault cell out of matrix bounds");
    }
}

void check_delta(double delta) {
    if (!std::isfinite(delta) || delta == 0.0) {
        throw std::domain_error("fault delta must be finite and nonzero");
    }
}

}  // namespace

void validate(const FaultSpec& spec, std::size_t rows, std::size_t cols) {
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ElementPerturb>) {
                check_cell(f.row, f.col, rows, cols);
                check_delta(f.delta);
            } else if constexpr (std::is_same_v<T, RowSwap>) {
                if (f.first >= rows || f.second >= rows) {
                    throw std::domain_error("row swap index out of bounds");
                }
                if (f.first == f.second) {
                    throw std::domain_error("row swap indices must be distinct");
                }
            } else if constexpr (std::is_same_v<T, ColSwap>) {
                if (f.first >= cols || f.second >= cols) {
                    throw std::domain_error("column swap index out of bounds");
                }
                if (f.first == f.second) {
                    throw std::domain_error(
                        "column swap indices must be distinct");
                }
            } else if constexpr (std::is_same_v<T, BitFlip>) {
                check_cell(f.row, f.col, rows, cols);
                if (f.bit > 63) {
                    throw std::domain_error("bit index must be in 0..63");
                }
            } else if constexpr (std::is_same_v<T, SparsePerturb>) {
                if (f.cells.empty()) {
                    throw std::domain_error("sparse fault must list cells");
                }
                std::set<std::pair<std::size_t, std::size_t>> seen;
                for (const auto& cell : f.cells) {
                    check_cell(cell.row, cell.col, rows, cols);
                    check_delta(cell.delta);
                    if (!seen.emplace(cell.row, cell.col).second) {
                        throw std::domain_error(
                            "sparse fault cells must be distinct");
                    }
                }
            }
        },
        spec);
}

Injection apply_fault(const DenseMatrix& c, const FaultSpec& spec) {
    validate(spec, c.rows(), c.cols());
    const std::size_t cols = c.cols();
    std::vector<double> data(c.data().begin(), c.data().end());
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ElementPerturb>) {
                data[f.row * cols + f.col] += f.delta;
            } else if constexpr (std::is_same_v<T, RowSwap>) {
                for (std::size_t j = 0; j < cols; ++j) {
                    std::swap(data[f.first * cols + j], data[f.second * cols + j]);
                }
            } else if constexpr (std::is_same_v<T, ColSwap>) {
                for (std::size_t i = 0; i < c.rows(); ++i) {
                    std::swap(data[i * cols + f.first], data[i * cols + f.second]);
                }
            } else if constexpr (std::is_same_v<T, BitFlip>) {
                double& target = data[f.row * cols + f.col];
                const auto bits =
                    std::bit_cast<std::uint64_t>(target) ^ (1ull << f.bit);
                target = std::bit_cast<double>(bits);
            } else if constexpr (std::is_same_v<T, SparsePerturb>) {
                for (const auto& cell : f.cells) {
                    data[cell.row * cols + cell.col] += cell.delta;
                }
            }
        },
        spec);
    // Faults may produce NaN/Inf (a flipped exponent bit, say); that is
    // real corruption and must reach the verifiers, hence corrupted().
    Injection out{DenseMatrix::corrupted(c.rows(), cols, std::move(data)), false};
    out.neutral = out.matrix.bitwise_equal(c);
    return out;
}

DenseMatrix delta_of(const DenseMatrix& a, const DenseMatrix& b,
                     const DenseMatrix& c_faulted, AccumulationMode mode) {
    return subtract(oracle_multiply(a, b, mode), c_faulted);
}

namespace {

struct FieldParser {
    std::string_view text;
    std::size_t pos = 0;

    std::string_view take_until(char sep, bool required_sep) {
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != sep && text[pos] != ';') ++pos;
        const auto field = text.substr(start, pos - start);
        if (pos < text.size() && text[pos] == sep) {
            ++pos;
        } else if (required_sep) {
            throw std::invalid_argument("fault grammar: expected '" +
                                        std::string(1, sep) + "' after '" +
                                        std::string(field) + "'");
        }
        return field;
    }

    bool at_end() const { return pos >= text.size(); }
};

std::size_t parse_index(std::string_view field, const char* what) {
    std::size_t value = 0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::invalid_argument(std::string("fault grammar: bad ") + what +
                                    " '" + std::string(field) + "'");
    }
    return value;
}

double parse_delta(std::string_view field) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                     value, std::chars_format::general);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::invalid_argument("fault grammar: bad delta '" +
                                    std::string(field) + "'");
    }
    return value;
}

}  // namespace

FaultSpec parse_fault(std::string_view text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument(
            "fault grammar: expected '<kind>:<args>', got '" +
            std::string(text) + "'");
    }
    const auto kind = text.substr(0, colon);
    FieldParser fields{text, colon + 1};

    if (kind == "element") {
        ElementPerturb f;
        f.row = parse_index(fields.take_until(',', true), "row");
        f.col = parse_index(fields.take_until(',', true), "column");
        f.delta = parse_delta(fields.take_until(',', false));
        if (!fields.at_end()) {
            throw std::invalid_argument("fault grammar: trailing content");
        }
        return f;
    }
    if (kind == "rowswap" || kind == "colswap") {
        const std::size_t first =
            parse_index(fields.take_until(',', true), "index");
        const std::size_t second =
            parse_index(fields.take_until(',', false), "index");
        if (!fields.at_end()) {
            throw std::invalid_argument("fault grammar: trailing content");
        }
        if (kind == "rowswap") return RowSwap{first, second};
        return ColSwap{first, second};
    }
    if (kind == "bitflip") {
        BitFlip f;
        f.row = parse_index(fields.take_until(',', true), "row");
        f.col = parse_index(fields.take_until(',', true), "column");
        const std::size_t bit =
            parse_index(fields.take_until(',', false), "bit index");
        if (!fields.at_end()) {
            throw std::invalid_argument("fault grammar: trailing content");
        }
        if (bit > 63) {
            throw std::invalid_argument("fault grammar: bit index must be 0..63");
        }
        f.bit = static_cast<unsigned>(bit);
        return f;
    }
    if (kind == "sparse") {
        SparsePerturb f;
        while (true) {
            ElementPerturb cell;
            cell.row = parse_index(fields.take_until(',', true), "row");
            cell.col = parse_index(fields.take_until(',', true), "column");
            cell.delta = parse_delta(fields.take_until(',', false));
            f.cells.push_back(cell);
            if (fields.at_end()) break;
            if (fields.text[fields.pos] != ';') {
                throw std::invalid_argument(
                    "fault grammar: expected ';' between sparse cells");
            }
            ++fields.pos;
        }
        return f;
    }
    throw std::invalid_argument("fault grammar: unknown kind '" +
                                std::string(kind) + "'");
}

namespace {

void append_number(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.append(buf, ptr);
}

}  // namespace

std::string to_string(const FaultSpec& spec) {
    std::string out;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ElementPerturb>) {
                out = "element:" + std::to_string(f.row) + "," +
                      std::to_string(f.col) + ",";
                append_number(out, f.delta);
            } else if constexpr (std::is_same_v<T, RowSwap>) {
                out = "rowswap:" + std::to_string(f.first) + "," +
                      std::to_string(f.second);
            } else if constexpr (std::is_same_v<T, ColSwap>) {
                out = "colswap:" + std::to_string(f.first) + "," +
                      std::to_string(f.second);
            } else if constexpr (std::is_same_v<T, BitFlip>) {
                out = "bitflip:" + std::to_string(f.row) + "," +
                      std::to_string(f.col) + "," + std::to_string(f.bit);
            } else if constexpr (std::is_same_v<T, SparsePerturb>) {
                out = "sparse:";
                bool first = true;
                for (const auto& cell : f.cells) {
                    if (!first) out += ";";
                    first = false;
                    out += std::to_string(cell.row) + "," +
                           std::to_string(cell.col) + ",";
                    append_number(out, cell.delta);
                }
            }
        },
        spec);
    return out;
}

}  // namespace gvfa::faults
