#ifndef GVFA_FAULTS_HPP
#define GVFA_FAULTS_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gvfa/matrix.hpp"

namespace gvfa::faults {

/// Adds delta to one entry.
struct ElementPerturb {
    std::size_t row = 0;
    std::size_t col = 0;
    double delta = 0.0;
};

/// Exchanges two rows; an address-decoding style memory fault.
struct RowSwap {
    std::size_t first = 0;
    std::size_t second = 0;
};

/// Exchanges two columns; the pattern row/column checksums cannot see.
struct ColSwap {
    std::size_t first = 0;
    std::size_t second = 0;
};

/// Flips one bit of the binary64 representation of one entry. bit 0 is the
/// mantissa LSB, bit 63 the sign. May produce NaN/Inf, which is kept: it
/// models real corruption and verifiers must reject it.
struct BitFlip {
    std::size_t row = 0;
    std::size_t col = 0;
    unsigned bit = 0;
};

/// Perturbs several distinct cells at once.
struct SparsePerturb {
    std::vector<ElementPerturb> cells;
};

using FaultSpec =
    std::variant<ElementPerturb, RowSwap, ColSwap, BitFlip, SparsePerturb>;

/// Checks indices against the target shape, swap distinctness, nonzero
/// finite deltas, and nonempty/distinct sparse cell lists. Throws
/// std::domain_error on violation.
void validate(const FaultSpec& spec, std::size_t rows, std::size_t cols);

struct Injection {
    DenseMatrix matrix;
    /// True iff the faulted copy is bitwise identical to the input (e.g.
    /// swapping two equal columns). Neutral applications are reported, not
    /// silently dropped, so experiments can count effective injections.
    bool neutral = false;
};

/// Returns a faulted copy of c; pure and deterministic.
Injection apply_fault(const DenseMatrix& c, const FaultSpec& spec);

/// Delta = oracle product of (a, b) minus the faulted matrix.
DenseMatrix delta_of(const DenseMatrix& a, const DenseMatrix& b,
                     const DenseMatrix& c_faulted, AccumulationMode mode);

/// Parses the CLI fault grammar:
///   element:<row>,<col>,<delta>
///   rowswap:<i1>,<i2>
///   colswap:<j1>,<j2>
///   bitflip:<row>,<col>,<bit>
///   sparse:<row>,<col>,<delta>[;<row>,<col>,<delta>]*
/// Throws std::invalid_argument with a description of the offending token.
FaultSpec parse_fault(std::string_view text);

/// Inverse of parse_fault (shortest round-trip number formatting).
std::string to_string(const FaultSpec& spec);

}  // namespace gvfa::faults

#endif  // GVFA_FAULTS_HPP
