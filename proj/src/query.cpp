#include "nibskg/query.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

namespace nibskg {

PatternSlot PatternSlot::var(std::string name) {
    PatternSlot slot;
    slot.variable = std::move(name);
    return slot;
}

PatternSlot PatternSlot::term(Term t) {
    PatternSlot slot;
    slot.constant = std::move(t);
    return slot;
}

namespace {

bool is_var_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_var_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class QueryParser {
public:
    explicit QueryParser(const std::string& text) : text_(text) {}

    SelectQuery parse() {
        SelectQuery query;
        skip_ws();
        while (keyword_ahead("PREFIX")) {
            expect_keyword("PREFIX");
            parse_prefix(query);
        }
        expect_keyword("SELECT");
        if (keyword_ahead("DISTINCT")) {
            expect_keyword("DISTINCT");
            query.distinct = true;
        }
        parse_projection(query);
        expect_keyword("WHERE");
        expect_char('{');
        parse_pattern_block(query);
        expect_char('}');
        skip_ws();
        if (keyword_ahead("ORDER")) {
            expect_keyword("ORDER");
            expect_keyword("BY");
            parse_order(query);
        }
        skip_ws();
        if (keyword_ahead("LIMIT")) {
            expect_keyword("LIMIT");
            query.limit = parse_nonnegative_int();
        }
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input");
        finalize(query);
        return query;
    }

private:
    [[noreturn]] void fail(const std::string& reason) const {
        fail_at(pos_, reason, ErrorCode::QuerySyntax);
    }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& reason,
                              ErrorCode code = ErrorCode::QuerySyntax) const {
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw LocatedError(code, line, col, reason);
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool keyword_ahead(const std::string& keyword) {
        skip_ws();
        if (pos_ + keyword.size() > text_.size()) return false;
        for (std::size_t i = 0; i < keyword.size(); ++i) {
            if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != keyword[i]) {
                return false;
            }
        }
        std::size_t end = pos_ + keyword.size();
        if (end < text_.size() && is_var_char(text_[end])) return false;
        return true;
    }

    void expect_keyword(const std::string& keyword) {
        if (!keyword_ahead(keyword)) fail("expected " + keyword);
        pos_ += keyword.size();
    }

    void expect_char(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    bool peek_char(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    std::string parse_variable() {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '?') fail("expected variable");
        ++pos_;
        if (pos_ >= text_.size() || !is_var_start(text_[pos_])) fail("bad variable name");
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_var_char(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    std::string parse_iriref() {
        expect_char('<');
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '>') {
            unsigned char c = static_cast<unsigned char>(text_[pos_]);
            if (c <= 0x20) fail("whitespace in IRI");
            ++pos_;
        }
        if (pos_ >= text_.size()) fail("unterminated IRI");
        std::string iri = text_.substr(start, pos_ - start);
        ++pos_;
        return iri;
    }

    void parse_prefix(SelectQuery& query) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ':' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        std::string name = text_.substr(start, pos_ - start);
        expect_char(':');
        query.prefixes[name] = parse_iriref();
    }

    void parse_projection(SelectQuery& query) {
        skip_ws();
        if (peek_char('*')) {
            ++pos_;
            query.star = true;
            return;
        }
        while (peek_char('?')) {
            query.projection.push_back(parse_variable());
        }
        if (query.projection.empty()) fail("projection needs '*' or at least one variable");
    }

    Term parse_constant_term(const SelectQuery& query) {
        skip_ws();
        if (pos_ >= text_.size()) fail("expected term");
        char c = text_[pos_];
        if (c == '<') {
            return Term(Iri::external(parse_iriref()));
        }
        if (c == '"') {
            return Term(parse_quoted_literal());
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            return Term(parse_number());
        }
        if (keyword_ahead("TRUE")) {
            pos_ += 4;
            return Term(Literal::boolean(true));
        }
        if (keyword_ahead("FALSE")) {
            pos_ += 5;
            return Term(Literal::boolean(false));
        }
        return Term(parse_prefixed_name(query));
    }

    Literal parse_quoted_literal() {
        expect_char('"');
        std::string lexical;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_];
            if (c == '\\') {
                ++pos_;
                if (pos_ >= text_.size()) fail("truncated escape");
                switch (text_[pos_]) {
                    case '\\': lexical.push_back('\\'); break;
                    case '"': lexical.push_back('"'); break;
                    case 'n': lexical.push_back('\n'); break;
                    case 'r': lexical.push_back('\r'); break;
                    case 't': lexical.push_back('\t'); break;
                    default: fail("unknown escape");
                }
                ++pos_;
            } else {
                lexical.push_back(c);
                ++pos_;
            }
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        ++pos_;
        if (pos_ + 1 < text_.size() && text_[pos_] == '^' && text_[pos_ + 1] == '^') {
            pos_ += 2;
            std::string dt_iri = parse_iriref();
            auto dt = datatype_from_xsd(dt_iri);
            if (!dt) fail("unsupported datatype: " + dt_iri);
            return Literal::make(lexical, *dt);
        }
        if (pos_ < text_.size() && text_[pos_] == '@') {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
                ++pos_;
            }
            if (pos_ == start) fail("empty language tag");
            return Literal::string(lexical, text_.substr(start, pos_ - start));
        }
        return Literal::string(lexical);
    }

    Literal parse_number() {
        std::size_t start = pos_;
        if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
        bool digits = false;
        bool dot = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits = true;
                ++pos_;
            } else if (c == '.' && !dot) {
                dot = true;
                ++pos_;
            } else {
                break;
            }
        }
        std::string lexical = text_.substr(start, pos_ - start);
        if (!digits) fail("malformed number");
        return dot ? Literal::decimal(lexical) : Literal::integer(lexical);
    }

    Iri parse_prefixed_name(const SelectQuery& query) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ':' &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (pos_ >= text_.size() || text_[pos_] != ':') {
            pos_ = start;
            fail("expected term");
        }
        std::string prefix = text_.substr(start, pos_ - start);
        ++pos_;
        std::size_t local_start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '-' || text_[pos_] == '.' || text_[pos_] == '%' ||
                text_[pos_] == '/')) {
            ++pos_;
        }
        std::string local = text_.substr(local_start, pos_ - local_start);
        auto it = query.prefixes.find(prefix);
        if (it == query.prefixes.end()) {
            fail_at(start, "unknown prefix: '" + prefix + "'", ErrorCode::UnknownPrefix);
        }
        return Iri::external(it->second + local);
    }

    PatternSlot parse_slot(const SelectQuery& query) {
        skip_ws();
        if (peek_char('?')) return PatternSlot::var(parse_variable());
        return PatternSlot::term(parse_constant_term(query));
    }

    void parse_pattern_block(SelectQuery& query) {
        while (true) {
            skip_ws();
            if (peek_char('}')) break;
            if (keyword_ahead("FILTER")) {
                expect_keyword("FILTER");
                parse_filter(query);
                continue;
            }
            TriplePattern pattern;
            pattern.subject = parse_slot(query);
            pattern.predicate = parse_slot(query);
            pattern.object = parse_slot(query);
            query.patterns.push_back(std::move(pattern));
            skip_ws();
            if (peek_char('.')) {
                ++pos_;
            }
        }
    }

    void parse_filter(SelectQuery& query) {
        expect_char('(');
        FilterExpr filter;
        filter.lhs = parse_operand(query);
        filter.op = parse_op();
        filter.rhs = parse_operand(query);
        expect_char(')');
        query.filters.push_back(std::move(filter));
    }

    FilterOperand parse_operand(const SelectQuery& query) {
        FilterOperand operand;
        skip_ws();
        if (peek_char('?')) {
            operand.variable = parse_variable();
        } else {
            operand.constant = parse_constant_term(query);
        }
        return operand;
    }

    FilterOp parse_op() {
        skip_ws();
        if (pos_ >= text_.size()) fail("expected comparison operator");
        char c = text_[pos_];
        char next = (pos_ + 1 < text_.size()) ? text_[pos_ + 1] : '\0';
        if (c == '=' ) { ++pos_; return FilterOp::Eq; }
        if (c == '!' && next == '=') { pos_ += 2; return FilterOp::Ne; }
        if (c == '<' && next == '=') { pos_ += 2; return FilterOp::Le; }
        if (c == '<') { ++pos_; return FilterOp::Lt; }
        if (c == '>' && next == '=') { pos_ += 2; return FilterOp::Ge; }
        if (c == '>') { ++pos_; return FilterOp::Gt; }
        fail("expected comparison operator");
    }

    void parse_order(SelectQuery& query) {
        bool ascending = true;
        if (keyword_ahead("ASC")) {
            expect_keyword("ASC");
        } else if (keyword_ahead("DESC")) {
            expect_keyword("DESC");
            ascending = false;
        }
        skip_ws();
        bool parenthesized = peek_char('(');
        if (parenthesized) ++pos_;
        std::string variable = parse_variable();
        if (parenthesized) expect_char(')');
        query.order_by = {variable, ascending};
    }

    std::size_t parse_nonnegative_int() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ == start) fail("expected a nonnegative integer");
        return static_cast<std::size_t>(std::stoull(text_.substr(start, pos_ - start)));
    }

    void finalize(SelectQuery& query) {
        std::vector<std::string> pattern_vars;
        auto note = [&](const PatternSlot& slot) {
            if (slot.is_variable() &&
                std::find(pattern_vars.begin(), pattern_vars.end(), *slot.variable) ==
                    pattern_vars.end()) {
                pattern_vars.push_back(*slot.variable);
            }
        };
        for (const auto& pattern : query.patterns) {
            note(pattern.subject);
            note(pattern.predicate);
            note(pattern.object);
        }
        auto require_bound = [&](const std::string& var, const char* where) {
            if (std::find(pattern_vars.begin(), pattern_vars.end(), var) == pattern_vars.end()) {
                throw Error(ErrorCode::UnboundVariable,
                            std::string(where) + " variable ?" + var +
                                " does not appear in any pattern");
            }
        };
        if (query.star) {
            if (query.patterns.empty()) {
                throw Error(ErrorCode::QuerySyntax, "empty graph pattern");
            }
            query.projection = pattern_vars;
        } else {
            for (const auto& var : query.projection) require_bound(var, "projected");
        }
        for (const auto& filter : query.filters) {
            if (filter.lhs.variable) require_bound(*filter.lhs.variable, "filtered");
            if (filter.rhs.variable) require_bound(*filter.rhs.variable, "filtered");
        }
        if (query.order_by) require_bound(query.order_by->first, "ordering");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

// ─── execution ─────────────────────────────────────────────────────────────

using Bindings = std::map<std::string, Term>;

// BGP matching is strict term equality; value-based comparison belongs to
// filters only.
bool slot_matches(const PatternSlot& slot, const Term& term, Bindings& bindings,
                  std::vector<std::string>& bound_here) {
    if (!slot.is_variable()) return slot.constant == term;
    auto it = bindings.find(*slot.variable);
    if (it != bindings.end()) return it->second == term;
    bindings.emplace(*slot.variable, term);
    bound_here.push_back(*slot.variable);
    return true;
}

std::optional<Iri> bound_iri(const PatternSlot& slot, const Bindings& bindings) {
    const Term* term = nullptr;
    if (slot.is_variable()) {
        auto it = bindings.find(*slot.variable);
        if (it == bindings.end()) return std::nullopt;
        term = &it->second;
    } else {
        term = &slot.constant;
    }
    if (!term->is_iri()) return std::nullopt; // literal slots can never bind an IRI position
    return term->iri();
}

std::optional<Term> bound_term(const PatternSlot& slot, const Bindings& bindings) {
    if (!slot.is_variable()) return slot.constant;
    auto it = bindings.find(*slot.variable);
    if (it == bindings.end()) return std::nullopt;
    return it->second;
}

bool evaluate_filter(const FilterExpr& filter, const Bindings& bindings) {
    auto resolve = [&](const FilterOperand& operand) -> const Term& {
        if (operand.variable) return bindings.at(*operand.variable);
        return operand.constant;
    };
    return filter_compare(resolve(filter.lhs), filter.op, resolve(filter.rhs));
}

void search(const Store& store, const std::vector<TriplePattern>& patterns, std::size_t depth,
            Bindings& bindings, const std::vector<FilterExpr>& filters,
            const std::vector<std::string>& header, std::vector<std::vector<Term>>& rows) {
    if (depth == patterns.size()) {
        for (const auto& filter : filters) {
            if (!evaluate_filter(filter, bindings)) return;
        }
        std::vector<Term> row;
        row.reserve(header.size());
        for (const auto& var : header) row.push_back(bindings.at(var));
        rows.push_back(std::move(row));
        return;
    }
    const TriplePattern& pattern = patterns[depth];
    // Constants and already-bound variables narrow the index probe. A bound
    // literal in subject/predicate position can never match, matching the
    // brute-force semantics.
    auto subject_bound = bound_term(pattern.subject, bindings);
    auto predicate_bound = bound_term(pattern.predicate, bindings);
    if ((subject_bound && subject_bound->is_literal()) ||
        (predicate_bound && predicate_bound->is_literal())) {
        return;
    }
    auto candidates = store.statements_matching(bound_iri(pattern.subject, bindings),
                                                bound_iri(pattern.predicate, bindings),
                                                bound_term(pattern.object, bindings));
    for (const auto& st : candidates) {
        std::vector<std::string> bound_here;
        bool ok = slot_matches(pattern.subject, Term(st.subject), bindings, bound_here) &&
                  slot_matches(pattern.predicate, Term(st.predicate), bindings, bound_here) &&
                  slot_matches(pattern.object, st.object, bindings, bound_here);
        if (ok) search(store, patterns, depth + 1, bindings, filters, header, rows);
        for (const auto& var : bound_here) bindings.erase(var);
    }
}

std::size_t pattern_selectivity(const Store& store, const TriplePattern& pattern) {
    bool any_constant = !pattern.subject.is_variable() || !pattern.predicate.is_variable() ||
                        !pattern.object.is_variable();
    if (!any_constant) return store.statement_count();
    Bindings none;
    if ((!pattern.subject.is_variable() && pattern.subject.constant.is_literal()) ||
        (!pattern.predicate.is_variable() && pattern.predicate.constant.is_literal())) {
        return 0;
    }
    return store
        .statements_matching(bound_iri(pattern.subject, none), bound_iri(pattern.predicate, none),
                             bound_term(pattern.object, none))
        .size();
}

} // namespace

bool filter_compare(const Term& lhs, FilterOp op, const Term& rhs) {
    if (op == FilterOp::Eq) return term_value_equal(lhs, rhs);
    if (op == FilterOp::Ne) return !term_value_equal(lhs, rhs);

    if (lhs.is_iri() != rhs.is_iri()) {
        throw Error(ErrorCode::TypeMismatch,
                    "ordering comparison between an IRI and a literal");
    }
    if (lhs.is_literal()) {
        const Literal& a = lhs.literal();
        const Literal& b = rhs.literal();
        auto cls = [](const Literal& lit) {
            if (lit.is_numeric()) return 0;
            return lit.datatype() == Datatype::Boolean ? 1 : 2;
        };
        if (cls(a) != cls(b)) {
            throw Error(ErrorCode::TypeMismatch,
                        "ordering comparison across literal value classes");
        }
    }
    int c = term_total_compare(lhs, rhs);
    switch (op) {
        case FilterOp::Lt: return c < 0;
        case FilterOp::Le: return c <= 0;
        case FilterOp::Gt: return c > 0;
        case FilterOp::Ge: return c >= 0;
        default: return false;
    }
}

int row_compare(const std::vector<Term>& a, const std::vector<Term>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        int c = term_total_compare(a[i], b[i]);
        if (c != 0) return c;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

SelectQuery parse_query(const std::string& text) { return QueryParser(text).parse(); }

ResultTable execute(const Store& store, const SelectQuery& query) {
    ResultTable table;
    table.header = query.projection;

    // Most selective pattern first; results are order-insensitive, so this is
    // purely a cost decision.
    std::vector<std::size_t> order(query.patterns.size());
    std::vector<std::size_t> scores(query.patterns.size());
    for (std::size_t i = 0; i < query.patterns.size(); ++i) {
        order[i] = i;
        scores[i] = pattern_selectivity(store, query.patterns[i]);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<TriplePattern> ordered;
    ordered.reserve(query.patterns.size());
    for (std::size_t i : order) ordered.push_back(query.patterns[i]);

    // Evaluation needs every pattern variable bound before projection.
    std::vector<std::string> all_vars;
    auto note = [&](const PatternSlot& slot) {
        if (slot.is_variable() &&
            std::find(all_vars.begin(), all_vars.end(), *slot.variable) == all_vars.end()) {
            all_vars.push_back(*slot.variable);
        }
    };
    for (const auto& pattern : query.patterns) {
        note(pattern.subject);
        note(pattern.predicate);
        note(pattern.object);
    }

    // Queries built by hand (not through parse_query) get the same
    // unbound-variable checks before anything is evaluated.
    auto index_of = [&](const std::string& var, const char* where) {
        auto it = std::find(all_vars.begin(), all_vars.end(), var);
        if (it == all_vars.end()) {
            throw Error(ErrorCode::UnboundVariable,
                        std::string(where) + " variable ?" + var +
                            " does not appear in any pattern");
        }
        return static_cast<std::size_t>(it - all_vars.begin());
    };
    std::vector<std::size_t> projection_index;
    for (const auto& var : table.header) {
        projection_index.push_back(index_of(var, "projected"));
    }
    std::optional<std::size_t> order_index;
    if (query.order_by) {
        order_index = index_of(query.order_by->first, "ordering");
    }
    for (const auto& filter : query.filters) {
        if (filter.lhs.variable) index_of(*filter.lhs.variable, "filtered");
        if (filter.rhs.variable) index_of(*filter.rhs.variable, "filtered");
    }

    std::vector<std::vector<Term>> full_rows;
    Bindings bindings;
    search(store, ordered, 0, bindings, query.filters, all_vars, full_rows);

    struct SortableRow {
        std::vector<Term> projected;
        Term order_key;
    };
    std::vector<SortableRow> rows;
    rows.reserve(full_rows.size());
    for (auto& full : full_rows) {
        SortableRow row;
        if (order_index) row.order_key = full[*order_index];
        row.projected.reserve(projection_index.size());
        for (std::size_t idx : projection_index) row.projected.push_back(full[idx]);
        rows.push_back(std::move(row));
    }

    bool ascending = !query.order_by || query.order_by->second;
    std::sort(rows.begin(), rows.end(), [&](const SortableRow& a, const SortableRow& b) {
        if (order_index) {
            int c = term_total_compare(a.order_key, b.order_key);
            if (c != 0) return ascending ? c < 0 : c > 0;
        }
        return row_compare(a.projected, b.projected) < 0;
    });

    for (auto& row : rows) table.rows.push_back(std::move(row.projected));

    if (query.distinct) {
        std::vector<std::vector<Term>> deduped;
        std::set<std::string> seen;
        for (auto& row : table.rows) {
            std::string key;
            for (const auto& term : row) {
                key += term.key();
                key += '\x1E';
            }
            if (seen.insert(key).second) deduped.push_back(std::move(row));
        }
        table.rows = std::move(deduped);
    }

    if (query.limit && table.rows.size() > *query.limit) {
        table.rows.resize(*query.limit);
    }
    return table;
}

std::string result_to_csv(const ResultTable& table) {
    auto quote = [](const std::string& field) {
        if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
        std::string out = "\"";
        for (char c : field) {
            if (c == '"') out += "\"\"";
            else out.push_back(c);
        }
        return out + "\"";
    };
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ",";
        out += quote(table.header[i]);
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += quote(row[i].is_iri() ? row[i].iri().full() : row[i].literal().lexical());
        }
        out += "\n";
    }
    return out;
}

std::string result_to_json(const ResultTable& table) {
    nlohmann::ordered_json doc;
    doc["vars"] = table.header;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json binding;
        for (std::size_t i = 0; i < row.size(); ++i) {
            nlohmann::ordered_json cell;
            if (row[i].is_iri()) {
                cell["type"] = "iri";
                cell["value"] = row[i].iri().full();
            } else {
                const Literal& lit = row[i].literal();
                cell["type"] = "literal";
                cell["value"] = lit.lexical();
                cell["datatype"] = xsd_iri(lit.datatype());
                if (lit.lang()) cell["lang"] = *lit.lang();
            }
            binding[table.header[i]] = cell;
        }
        doc["rows"].push_back(binding);
    }
    return doc.dump(2) + "\n";
}

} // namespace nibskg
