#ifndef SAM_PDDL_H
#define SAM_PDDL_H

#include "sam/model.h"

#include <string>

namespace sam {

class PddlError : public std::runtime_error {
public:
    PddlError(int line, int column, const std::string &message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/*
  Reads the nondeterministic-track STRIPS subset: typed or untyped schemas,
  quantifier-free and/or/not/imply preconditions, literal effects with at most
  one top-level oneof. Schemas are grounded by exhaustive typed substitution.

  Ground atoms become binary variables, except for 0-ary atoms named
  "<var>:<value>": when such a family is an exactly-one group (one member true
  initially, every effect adding a member deletes the others), it is read back
  as a single finite-domain variable <var>. Variables named "<owner>.<rest>"
  are attributed to business object <owner>.
*/
PlanningTask parse_pddl(const std::string &domain_text, const std::string &problem_text);

struct PddlFiles {
    std::string domain;
    std::string problem;
};

// Writes every fact as a 0-ary "<var>:<value>" atom, so parse_pddl recovers
// the finite-domain task. Action names have spaces replaced by '_'.
PddlFiles print_pddl(const PlanningTask &task);

std::string pddl_action_name(const std::string &name);

} // namespace sam

#endif
