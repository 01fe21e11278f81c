#pragma once

#include <string_view>

#include "fusionlab/formula.hpp"

namespace fusionlab {

/// Parses the workbench formula grammar:
///
///   formula  := imp ('<->' imp)?
///   imp      := or ('->' imp)?
///   or       := and ('|' and)*
///   and      := unary ('&' unary)*
///   unary    := '!' unary | ('forall'|'exists') var (',' var)* ':' formula | primary
///   primary  := '(' formula ')' | 'true' | 'false' | R(t,...) | t '=' t
///   var      := [a-z][a-zA-Z0-9]* ('[' Sort ']')?
///
/// Unannotated variable sorts are inferred from argument positions and
/// equalities; single-sorted languages fall back to the only sort.
/// Throws ParseError (with offset) or SortError.
Formula parse_formula(std::string_view text, const Language& lang);

/// Same grammar for a lone term (used for CLI inputs).
Term parse_term(std::string_view text, const Language& lang);

}  // namespace fusionlab
