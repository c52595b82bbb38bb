#include "mwp/solver.hpp"

#include <sstream>

#include "mwp/errors.hpp"
#include "mwp/parser.hpp"

namespace mwp {

namespace {

struct Affine {
    std::map<std::string, Rational> terms;
    Rational constant;

    void scale(const Rational& k) {
        for (auto& [_, c] : terms) c *= k;
        constant *= k;
    }

    void accumulate(const Affine& other, const Rational& sign) {
        for (const auto& [v, c] : other.terms) terms[v] += sign * c;
        constant += sign * other.constant;
    }
};

Affine affine(const Expression& e) {
    using K = Expression::Kind;
    switch (e.kind()) {
        case K::Constant:
            return Affine{{}, e.value()};
        case K::Variable:
            return Affine{{{e.name(), Rational(1)}}, Rational(0)};
        case K::Neg: {
            Affine a = affine(e.lhs());
            a.scale(Rational(-1));
            return a;
        }
        case K::Add:
        case K::Sub: {
            Affine a = affine(e.lhs());
            a.accumulate(affine(e.rhs()), Rational(e.kind() == K::Add ? 1 : -1));
            return a;
        }
        case K::Mul: {
            if (e.lhs().contains_variable() && e.rhs().contains_variable()) throw NonlinearError(render(e));
            Affine a = affine(e.lhs());
            Affine b = affine(e.rhs());
            if (e.lhs().contains_variable()) {
                a.scale(b.constant);
                return a;
            }
            b.scale(a.constant);
            return b;
        }
        case K::Div: {
            if (e.rhs().contains_variable()) throw NonlinearError(render(e));
            Rational divisor = affine(e.rhs()).constant;
            if (divisor.is_zero()) throw DivisionByZero("constant zero divisor in " + render(e));
            Affine a = affine(e.lhs());
            a.scale(divisor.reciprocal());
            return a;
        }
    }
    throw std::logic_error("unreachable expression kind");
}

}  // namespace

LinearRow linearize(const Equation& eq) {
    Affine left = affine(eq.lhs);
    left.accumulate(affine(eq.rhs), Rational(-1));
    LinearRow row;
    for (auto& [v, c] : left.terms)
        if (!c.is_zero()) row.coefficients.emplace(v, std::move(c));
    row.constant = -left.constant;
    return row;
}

SolveOutcome solve_system(const EquationSystem& system) {
    const auto& vars = system.variables();
    const std::size_t n = vars.size();

    std::vector<std::vector<Rational>> m;
    m.reserve(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) {
        LinearRow row;
        try {
            row = linearize(system.equations()[i]);
        } catch (const NonlinearError& e) {
            return Nonlinear{i, e.term()};
        } catch (const DivisionByZero& e) {
            return Nonlinear{i, e.what()};
        }
        std::vector<Rational> dense(n + 1);
        for (std::size_t j = 0; j < n; ++j) {
            auto it = row.coefficients.find(vars[j]);
            if (it != row.coefficients.end()) dense[j] = it->second;
        }
        dense[n] = row.constant;
        m.push_back(std::move(dense));
    }

    // Gauss-Jordan, first nonzero pivot in column order.
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < m.size() && m[pivot][col].is_zero()) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[pivot], m[rank]);
        const Rational inv = m[rank][col].reciprocal();
        for (std::size_t j = col; j <= n; ++j) m[rank][j] *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == rank || m[i][col].is_zero()) continue;
            const Rational factor = m[i][col];
            for (std::size_t j = col; j <= n; ++j) m[i][j] -= factor * m[rank][j];
        }
        ++rank;
    }

    for (std::size_t i = rank; i < m.size(); ++i)
        if (!m[i][n].is_zero()) return Inconsistent{};
    if (rank < n) return Underdetermined{rank};

    // Full column rank: row i holds the pivot of column i.
    Unique unique;
    for (std::size_t j = 0; j < n; ++j) unique.assignment.emplace(vars[j], m[j][n]);
    return unique;
}

bool is_unique(const SolveOutcome& outcome) { return std::holds_alternative<Unique>(outcome); }

std::string describe(const SolveOutcome& outcome, const std::vector<std::string>& order) {
    std::ostringstream os;
    if (const auto* u = std::get_if<Unique>(&outcome)) {
        os << "Unique{";
        bool first = true;
        auto emit = [&](const std::string& name, const Rational& value) {
            if (!first) os << ", ";
            first = false;
            os << name << ':' << value;
        };
        if (order.empty()) {
            for (const auto& [k, v] : u->assignment) emit(k, v);
        } else {
            for (const auto& k : order)
                if (auto it = u->assignment.find(k); it != u->assignment.end()) emit(k, it->second);
        }
        os << '}';
    } else if (const auto* ud = std::get_if<Underdetermined>(&outcome)) {
        os << "Underdetermined(rank " << ud->rank << ')';
    } else if (std::holds_alternative<Inconsistent>(outcome)) {
        os << "Inconsistent";
    } else {
        const auto& nl = std::get<Nonlinear>(outcome);
        os << "Nonlinear(equation " << nl.equation_index << ": " << nl.detail << ')';
    }
    return os.str();
}

bool check_assignment(const EquationSystem& system, const Bindings& assignment, const Rational& tolerance) {
    for (const auto& v : system.variables())
        if (!assignment.count(v)) throw UnboundVariable(v);
    for (const auto& eq : system.equations()) {
        try {
            Rational residual = evaluate(eq.lhs, assignment) - evaluate(eq.rhs, assignment);
            if (residual.abs() > tolerance) return false;
        } catch (const DivisionByZero&) {
            return false;
        }
    }
    return true;
}

bool Tolerance::within(const Rational& predicted, const Rational& gold) const {
    const Rational diff = (predicted - gold).abs();
    if (diff <= absolute) return true;
    const Rational magnitude = gold.abs();
    return magnitude > relative_above && diff <= relative * magnitude;
}

namespace {

// Kuhn's augmenting-path matching; answer lists are tiny.
bool augment(std::size_t p, const std::vector<std::vector<bool>>& ok, std::vector<bool>& seen,
             std::vector<int>& gold_owner) {
    for (std::size_t g = 0; g < ok[p].size(); ++g) {
        if (!ok[p][g] || seen[g]) continue;
        seen[g] = true;
        if (gold_owner[g] < 0 || augment(static_cast<std::size_t>(gold_owner[g]), ok, seen, gold_owner)) {
            gold_owner[g] = static_cast<int>(p);
            return true;
        }
    }
    return false;
}

}  // namespace

bool match_answers(const std::vector<Rational>& predicted, const std::vector<Rational>& gold,
                   const Tolerance& tolerance) {
    if (predicted.size() != gold.size()) return false;
    std::vector<std::vector<bool>> ok(predicted.size(), std::vector<bool>(gold.size()));
    for (std::size_t p = 0; p < predicted.size(); ++p)
        for (std::size_t g = 0; g < gold.size(); ++g) ok[p][g] = tolerance.within(predicted[p], gold[g]);
    std::vector<int> owner(gold.size(), -1);
    for (std::size_t p = 0; p < predicted.size(); ++p) {
        std::vector<bool> seen(gold.size());
        if (!augment(p, ok, seen, owner)) return false;
    }
    return true;
}

bool match_answers(const Bindings& predicted, const std::vector<Rational>& gold, const Tolerance& tolerance) {
    std::vector<Rational> values;
    values.reserve(predicted.size());
    for (const auto& [_, v] : predicted) values.push_back(v);
    return match_answers(values, gold, tolerance);
}

VerifierVerdict VerifierVerdict::ok() {
    VerifierVerdict v;
    v.accepted = true;
    v.reason = Reason::OK;
    v.message = "accepted";
    return v;
}

const char* to_string(VerifierVerdict::Reason reason) {
    switch (reason) {
        case VerifierVerdict::Reason::OK: return "OK";
        case VerifierVerdict::Reason::NotUnique: return "NotUnique";
        case VerifierVerdict::Reason::OracleMismatch: return "OracleMismatch";
        case VerifierVerdict::Reason::Nonlinear: return "Nonlinear";
        case VerifierVerdict::Reason::ParseFailure: return "ParseFailure";
    }
    return "?";
}

VerifierVerdict verify_candidate(const EquationSystem& system, const Bindings& oracle) {
    VerifierVerdict v;
    const SolveOutcome outcome = solve_system(system);
    if (const auto* nl = std::get_if<Nonlinear>(&outcome)) {
        v.reason = VerifierVerdict::Reason::Nonlinear;
        v.message = "equation " + std::to_string(nl->equation_index + 1) + " is not linear (" + nl->detail + ")";
        return v;
    }
    if (!is_unique(outcome)) {
        v.reason = VerifierVerdict::Reason::NotUnique;
        v.message = "system has no unique solution: " + describe(outcome);
        return v;
    }
    const auto& solution = std::get<Unique>(outcome).assignment;
    for (const auto& name : system.variables()) {
        const Rational& got = solution.at(name);
        auto it = oracle.find(name);
        if (it == oracle.end() || it->second != got) {
            v.reason = VerifierVerdict::Reason::OracleMismatch;
            v.variable = name;
            v.got = got;
            if (it != oracle.end()) v.expected = it->second;
            v.message = "solution gives " + name + " = " + got.to_string() + " but the oracle value is " +
                        (v.expected ? v.expected->to_string() : std::string("unknown"));
            return v;
        }
    }
    for (const auto& [name, value] : oracle) {
        if (solution.count(name)) continue;
        v.reason = VerifierVerdict::Reason::OracleMismatch;
        v.variable = name;
        v.expected = value;
        v.message = "the oracle binds " + name + " but the system does not mention it";
        return v;
    }
    return VerifierVerdict::ok();
}

VerifierVerdict verify_candidate_text(std::string_view system_text, const Bindings& oracle) {
    EquationSystem system;
    try {
        system = parse_system(system_text);
    } catch (const SyntaxError& e) {
        VerifierVerdict v;
        v.reason = VerifierVerdict::Reason::ParseFailure;
        v.message = e.what();
        return v;
    }
    return verify_candidate(system, oracle);
}

}  // namespace mwp
