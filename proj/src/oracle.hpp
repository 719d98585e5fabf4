#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formula.hpp"

namespace ppa {

struct Interval {
    Int lo, hi;  // closed; lo <= hi
};

// Per-variable integer ranges, with an optional default used for names
// without their own entry (prenexing renames variables, so transforms can
// still be cross-checked with a uniform box).
class Box {
  public:
    Box() = default;
    static Box uniform(Int lo, Int hi);
    void set(const std::string& name, Int lo, Int hi);
    void set_fallback(Int lo, Int hi);
    Interval get(const std::string& name) const;
    bool covers(const std::string& name) const;

  private:
    std::map<std::string, Interval> entries_;
    std::optional<Interval> fallback_;
};

inline constexpr uint64_t kDefaultNodeBudget = 100000000;

// Counts atom evaluations across an oracle call; exceeding the limit raises
// ResourceLimit. Shared by worker threads, so totals (and thus whether the
// limit trips) do not depend on the schedule.
class Budget {
  public:
    explicit Budget(uint64_t limit = kDefaultNodeBudget) : limit_(limit) {}
    void charge(uint64_t n = 1) {
        if (used_.fetch_add(n, std::memory_order_relaxed) + n > limit_)
            throw ResourceLimit("node budget exceeded");
    }
    uint64_t used() const { return used_.load(std::memory_order_relaxed); }

  private:
    std::atomic<uint64_t> used_{0};
    uint64_t limit_;
};

struct OracleOptions {
    uint64_t budget = kDefaultNodeBudget;
    int jobs = 1;
};

// Truth of a quantifier-free ground formula at a full assignment.
bool eval_qf(const GroundFormula& f, const std::map<std::string, Int>& point);

// Truth of the box-relativized formula: quantifiers range over their box
// entries; free variables are bound by `point` when given, otherwise they
// are treated as outermost existentials over `box`.
bool decide_bounded(const GroundFormula& f, const Box& box,
                    const std::map<std::string, Int>& point = {},
                    const OracleOptions& opts = {});

// Number of free-variable points in free_box satisfying the quant_box-
// relativized formula.
Int count_bounded(const GroundFormula& f, const Box& free_box, const Box& quant_box,
                  const OracleOptions& opts = {});

// The satisfying points themselves, lexicographically sorted in the
// formula's variable declaration order.
std::vector<std::vector<Int>> enumerate_solutions(const GroundFormula& f, const Box& free_box,
                                                  const Box& quant_box,
                                                  const OracleOptions& opts = {});

}  // namespace ppa
