#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ubmcqmc/random_streams.hpp"
#include "ubmcqmc/variable_matrix.hpp"

namespace ubmcqmc {

/// How rows before the core matrix are filled.
enum class BurnInPolicy {
    iid,      // rows 1..k-1 IID, rows k..m from the core matrix
    wcud,     // the core matrix drives every row 1..m, wrapping cyclically
};

/// Row t (1-based) of the driving sequence for the X chain of one coupled
/// run. Also owns the auxiliary IID stream that X updates draw from, so the
/// X trajectory depends only on this object and the initial state.
class RowProvider {
public:
    /// Purely IID driving rows.
    RowProvider(std::size_t dim, std::uint64_t seed, std::uint64_t chain)
        : dim_(dim),
          burn_in_(seed, chain, StreamRole::burn_in),
          overflow_(seed, chain, StreamRole::overflow),
          aux_(seed, chain, StreamRole::x_aux),
          buffer_(dim) {}

    /// Core rows k..m, with m = N + k - 1.
    RowProvider(std::shared_ptr<const VariableMatrix> core, std::size_t k, std::uint64_t seed,
                std::uint64_t chain, BurnInPolicy policy = BurnInPolicy::iid)
        : RowProvider(core->cols(), seed, chain) {
        if (k < 1) throw Error("burn-in k must be at least 1");
        core_ = std::move(core);
        k_ = k;
        policy_ = policy;
    }

    std::size_t dim() const { return dim_; }
    bool has_core() const { return core_ != nullptr; }
    std::size_t burn_in() const { return k_; }
    /// Last row index served from the core matrix (0 without a core).
    std::size_t core_end() const { return core_ ? core_->rows() + k_ - 1 : 0; }

    std::span<const double> row(std::size_t t) {
        if (t == 0) throw Error("driving rows are 1-based");
        if (core_) {
            const std::size_t n = core_->rows();
            if (t >= k_ && t <= core_end()) return core_->row(t - k_);
            if (t < k_ && policy_ == BurnInPolicy::wcud) return core_->row((t - k_ + n * k_) % n);
        }
        IidStream s = (core_ && t > core_end()) ? overflow_.substream(t) : burn_in_.substream(t);
        s.fill(buffer_);
        return buffer_;
    }

    IidStream& aux() { return aux_; }

private:
    std::size_t dim_;
    std::shared_ptr<const VariableMatrix> core_;
    std::size_t k_ = 1;
    BurnInPolicy policy_ = BurnInPolicy::iid;
    IidStream burn_in_, overflow_, aux_;
    std::vector<double> buffer_;
};

}  // namespace ubmcqmc
