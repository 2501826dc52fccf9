#pragma once

#include "leximin/programs.hpp"

namespace fixtures {

using leximin::Constraint;
using leximin::MultiObjectiveProblem;
using leximin::Relation;

// f = (x1, x2) over x1 <= 100, x1 + x2 <= 200, x >= 0.
inline MultiObjectiveProblem adversarial_pair() {
  return MultiObjectiveProblem::linear(2,
                                       {Constraint<double>{{1, 0}, Relation::less_equal, 100},
                                        Constraint<double>{{1, 1}, Relation::less_equal, 200}},
                                       {{1, 0}, {0, 1}});
}

// f = (x1, x2) over x1 + x2 <= 1, x >= 0.
inline MultiObjectiveProblem unit_simplex_pair() {
  return MultiObjectiveProblem::linear(2, {Constraint<double>{{1, 1}, Relation::less_equal, 1}}, {{1, 0}, {0, 1}});
}

inline MultiObjectiveProblem table_vectors() {
  return MultiObjectiveProblem::finite({{1, 10, 15}, {1, 40, 60}, {2, 20, 30}});
}

inline leximin::IterationLedger ledger_of(std::initializer_list<double> z) {
  leximin::IterationLedger l;
  for (double v : z) l.record(v, leximin::Solution{});
  return l;
}

}  // namespace fixtures
