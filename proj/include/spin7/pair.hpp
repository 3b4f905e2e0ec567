#pragma once

#include <numeric>
#include <stdexcept>
#include <string>

namespace spin7 {

/// Input or domain errors raised by constructors and solvers.
struct NotCoprimeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ExceptionalPairError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NoConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WrongBranchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Chirality of the first-order condition: selects the +/- branch of the
/// constraint surfaces S_1..S_4.
enum class Branch { plus, minus };

inline constexpr double branch_sign(Branch b) {
    return b == Branch::plus ? 1.0 : -1.0;
}

inline const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

/// Which lens-space fiber collapses at the singular orbit.  The associated
/// integer is i in {k+l, l, k}.
enum class Fiber { KplusL, L, K };

inline const char* to_string(Fiber f) {
    switch (f) {
        case Fiber::KplusL: return "kplusl";
        case Fiber::L: return "l";
        default: return "k";
    }
}

/// A validated coprime parameter pair (k,l) with delta = k^2 + k l + l^2.
///
/// Construction rejects non-coprime pairs and the exceptional pairs
/// (1,0), (0,1), (1,1), for which the four isotropy summands are not
/// pairwise inequivalent and the diagonal ansatz breaks down.
class CoprimePair {
  public:
    CoprimePair(long k, long l) : k_(k), l_(l) {
        if (k < 0 || l < 0) throw DomainError("CoprimePair: k, l must be non-negative");
        if (std::gcd(k, l) != 1)
            throw NotCoprimeError("CoprimePair: gcd(k,l) != 1 for (" + std::to_string(k) +
                                  "," + std::to_string(l) + ")");
        if (k * l * (k - l) == 0)
            throw ExceptionalPairError(
                "CoprimePair: exceptional pair (" + std::to_string(k) + "," + std::to_string(l) +
                "); the pairs (1,0), (0,1), (1,1) are excluded");
        delta_ = k * k + k * l + l * l;
    }

    long k() const { return k_; }
    long l() const { return l_; }
    long delta() const { return delta_; }

    /// Fiber integer i for the given orbit label.
    long fiber_order(Fiber f) const {
        switch (f) {
            case Fiber::KplusL: return k_ + l_;
            case Fiber::L: return l_;
            default: return k_;
        }
    }

    bool operator==(const CoprimePair& o) const { return k_ == o.k_ && l_ == o.l_; }

  private:
    long k_, l_;
    long delta_;
};

/// validate_pair is the checked constructor spelled as a free function.
inline CoprimePair validate_pair(long k, long l) { return CoprimePair(k, l); }

///// Orbit label: fiber enum plus its integer order.
struct OrbitLabel {
    Fiber fiber;
    long order;  // i in {k+l, l, k}, always > 0 for a valid pair

    OrbitLabel(Fiber f, const CoprimePair& pair) : fiber(f), order(pair.fiber_order(f)) {}

    /// The chirality branch carrying the Type I point of this orbit.
    Branch branch() const { return fiber == Fiber::KplusL ? Branch::plus : Branch::minus; }
};

}  // namespace spin7
