#ifndef TOPOS_BITS_HPP
#define TOPOS_BITS_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace topos {

// Dynamic bit set with value semantics. Used for subsets of poset objects
// (sieves) and subsets of presheaf fibers, which can outgrow 64 bits once
// context products enter the picture.
class Bits {
public:
    Bits() = default;
    explicit Bits(int n) : n_(n), w_((n + 63) / 64, 0) {}

    static Bits full(int n) {
        Bits b(n);
        for (int i = 0; i < n; ++i) b.set(i);
        return b;
    }

    int size() const { return n_; }

    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) { w_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
    void assign(int i, bool v) { v ? set(i) : reset(i); }

    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    int count() const {
        int c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }

    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    Bits& operator&=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    friend Bits operator&(Bits a, const Bits& b) { return a &= b; }
    friend Bits operator|(Bits a, const Bits& b) { return a |= b; }

    Bits complement() const {
        Bits r(n_);
        for (int i = 0; i < n_; ++i)
            if (!test(i)) r.set(i);
        return r;
    }

    bool operator==(const Bits&) const = default;

    // Canonical total order: compare as little-endian integers, so that the
    // empty set comes first and enumeration by ascending value matches the
    // declaration order of elements.
    bool operator<(const Bits& o) const {
        for (std::size_t i = w_.size(); i-- > 0;)
            if (w_[i] != o.w_[i]) return w_[i] < o.w_[i];
        return false;
    }

    // Iteration over set bits: for (int i = b.first(); i >= 0; i = b.next(i))
    int first() const { return scan(0); }
    int next(int i) const { return scan(i + 1); }

    const std::vector<std::uint64_t>& words() const { return w_; }

private:
    int scan(int from) const {
        if (from >= n_) return -1;
        int wi = from >> 6;
        std::uint64_t w = w_[wi] & (~std::uint64_t(0) << (from & 63));
        while (true) {
            if (w) {
                int i = (wi << 6) + std::countr_zero(w);
                return i < n_ ? i : -1;
            }
            if (++wi >= int(w_.size())) return -1;
            w = w_[wi];
        }
    }

    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace topos

#endif
