#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nibskg/store.hpp"

namespace nibskg {

// One slot of a triple pattern: a variable name (without '?') or a constant.
struct PatternSlot {
    std::optional<std::string> variable;
    Term constant;

    bool is_variable() const { return variable.has_value(); }
    static PatternSlot var(std::string name);
    static PatternSlot term(Term t);
};

struct TriplePattern {
    PatternSlot subject;
    PatternSlot predicate;
    PatternSlot object;
};

enum class FilterOp { Eq, Ne, Lt, Le, Gt, Ge };

struct FilterOperand {
    std::optional<std::string> variable;
    Term constant;
};

struct FilterExpr {
    FilterOperand lhs;
    FilterOp op = FilterOp::Eq;
    FilterOperand rhs;
};

struct SelectQuery {
    std::map<std::string, std::string> prefixes;
    bool star = false;
    std::vector<std::string> projection; // in SELECT order (or pattern order for '*')
    std::vector<TriplePattern> patterns;
    std::vector<FilterExpr> filters;
    bool distinct = false;
    std::optional<std::pair<std::string, bool>> order_by; // (variable, ascending)
    std::optional<std::size_t> limit;
};

struct ResultTable {
    std::vector<std::string> header;             // variable names, no '?'
    std::vector<std::vector<Term>> rows;         // row arity == header arity
};

// Grammar: PREFIX lines, then
//   SELECT [DISTINCT] (?v... | *) WHERE { pattern ('.' pattern)* FILTER(...)* }
//   [ORDER BY [ASC|DESC](?v)] [LIMIT n]
// Keywords are case-insensitive; prefixed names expand against the declared
// prefixes. Projection, filter and order variables must occur in a pattern.
SelectQuery parse_query(const std::string& text);

// Conjunctive evaluation with bag semantics (set under DISTINCT). Rows come
// back in a canonical deterministic order: the ORDER BY key first when given
// (ties broken by the full row), otherwise the full-row order. LIMIT
// truncates after ordering. Ordering comparisons between IRIs and literals,
// or across literal classes, raise TypeMismatch.
ResultTable execute(const Store& store, const SelectQuery& query);

std::string result_to_csv(const ResultTable& table);
std::string result_to_json(const ResultTable& table);

// Shared comparison semantics for filters; throws TypeMismatch for ordering
// operators over incomparable terms. Exposed so equivalence oracles can use
// identical value semantics without sharing the evaluation machinery.
bool filter_compare(const Term& lhs, FilterOp op, const Term& rhs);

int row_compare(const std::vector<Term>& a, const std::vector<Term>& b);

} // namespace nibskg
