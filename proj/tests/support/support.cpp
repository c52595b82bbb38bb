#include "support.hpp"

#include <fstream>
#include <sstream>

#ifndef MWP_TEST_DATA_DIR
#error "MWP_TEST_DATA_DIR must be defined"
#endif

namespace mwp::testing {

std::filesystem::path data_dir() { return MWP_TEST_DATA_DIR; }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("mwp_test_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

Completion ScriptedBackend::complete(const ChatRequest& request) {
    const std::string& prompt = request.messages.back().text;
    {
        std::lock_guard lock(mutex_);
        prompts_.push_back(prompt);
    }
    return {responder_(prompt), FinishReason::Stop, std::nullopt};
}

std::vector<std::string> ScriptedBackend::prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return prompts_.size();
}

Completion QueueBackend::complete(const ChatRequest& request) {
    prompts_.push_back(request.messages.back().text);
    if (next_ >= replies_.size()) throw TransportError("queue exhausted");
    return {replies_[next_++], FinishReason::Stop, std::nullopt};
}

mpz_class laplace_determinant(const IntMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    if (n == 2) return mpz_class(m[0][0]) * m[1][1] - mpz_class(m[0][1]) * m[1][0];
    mpz_class det = 0;
    for (std::size_t col = 0; col < n; ++col) {
        if (m[0][col] == 0) continue;
        IntMatrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<std::int64_t> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != col) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        const mpz_class term = mpz_class(m[0][col]) * laplace_determinant(minor);
        if (col % 2 == 0) det += term;
        else det -= term;
    }
    return det;
}

namespace {

// Determinant of `a` with column `col` replaced by `b`, scaled so the
// right-hand side is integral.
mpq_class replaced_determinant(const IntMatrix& a, const std::vector<mpq_class>& b, std::size_t col) {
    mpz_class scale = 1;
    for (const auto& v : b) scale = lcm(scale, mpz_class(v.get_den()));
    IntMatrix m = a;
    for (std::size_t r = 0; r < a.size(); ++r) {
        mpq_class scaled = b[r] * scale;
        m[r][col] = scaled.get_num().get_si();
    }
    mpq_class out(laplace_determinant(m), scale);
    out.canonicalize();
    return out;
}

}  // namespace

std::optional<std::vector<mpq_class>> cramer_solve(const IntMatrix& a, const std::vector<mpq_class>& b) {
    const mpz_class det = laplace_determinant(a);
    if (det == 0) return std::nullopt;
    std::vector<mpq_class> x;
    for (std::size_t col = 0; col < a.size(); ++col) {
        mpq_class v = replaced_determinant(a, b, col) / mpq_class(det);
        v.canonicalize();
        x.push_back(v);
    }
    return x;
}

namespace {

const std::vector<std::string> kNames = {"x", "y", "z", "w", "u", "v"};

std::string coefficient_term(std::mt19937& rng, std::int64_t c, const std::string& name, bool first) {
    std::string out;
    const std::int64_t mag = c < 0 ? -c : c;
    if (first) out += c < 0 ? "-" : "";
    else out += c < 0 ? " - " : " + ";
    switch (rng() % 3) {
        case 0: out += mag == 1 ? name : std::to_string(mag) + name; break;
        case 1: out += std::to_string(mag) + " * " + name; break;
        default: out += std::to_string(mag) + "(" + name + ")"; break;
    }
    return out;
}

std::string constant_text(const mpq_class& q) { return Rational(q).to_string(); }

}  // namespace

RandomSystem random_full_rank_system(std::mt19937& rng, int k) {
    RandomSystem s;
    s.names.assign(kNames.begin(), kNames.begin() + k);
    std::uniform_int_distribution<int> value(-40, 40);
    std::vector<mpq_class> x;
    for (int i = 0; i < k; ++i) {
        mpq_class v(value(rng), (rng() % 4 == 0) ? 2 : 1);
        v.canonicalize();
        x.push_back(v);
        s.assignment[s.names[i]] = Rational(v);
    }
    std::uniform_int_distribution<int> coeff(-9, 9);
    do {
        s.coefficients.assign(k, std::vector<std::int64_t>(k, 0));
        for (auto& row : s.coefficients)
            for (auto& c : row) c = coeff(rng);
    } while (laplace_determinant(s.coefficients) == 0);

    std::string text;
    for (int r = 0; r < k; ++r) {
        mpq_class rhs = 0;
        for (int c = 0; c < k; ++c) rhs += s.coefficients[r][c] * x[c];
        s.rhs.push_back(rhs);
        std::string lhs;
        bool first = true;
        for (int c = 0; c < k; ++c) {
            if (s.coefficients[r][c] == 0) continue;
            lhs += coefficient_term(rng, s.coefficients[r][c], s.names[c], first);
            first = false;
        }
        if (first) lhs = "0";
        std::string rhs_text = constant_text(rhs);
        if (rhs < 0) rhs_text = "(" + rhs_text + ")";
        // Sometimes move the constant to the left.
        std::string eq = (rng() % 2 == 0) ? lhs + " = " + rhs_text : lhs + " - " + rhs_text + " = 0";
        if (!text.empty()) text += "; ";
        text += eq;
    }
    s.text = text;
    return s;
}

Expression random_expression(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || rng() % 4 == 0) {
        if (rng() % 2 == 0 && !vars.empty()) return Expression::variable(vars[rng() % vars.size()]);
        static const char* constants[] = {"0", "1", "2", "3.5", "0.25", "10", "0.018", "7", "125.5", "1000"};
        return Expression::constant(*Rational::parse(constants[rng() % 10]));
    }
    switch (rng() % 5) {
        case 0: return Expression::add(random_expression(rng, vars, depth - 1), random_expression(rng, vars, depth - 1));
        case 1: return Expression::sub(random_expression(rng, vars, depth - 1), random_expression(rng, vars, depth - 1));
        case 2: return Expression::mul(random_expression(rng, vars, depth - 1), random_expression(rng, vars, depth - 1));
        case 3: {
            Expression divisor = random_expression(rng, vars, depth - 1);
            const Expression& core = divisor.kind() == Expression::Kind::Neg ? divisor.lhs() : divisor;
            if (core.kind() == Expression::Kind::Constant && core.value().is_zero())
                divisor = Expression::constant(Rational(4));
            return Expression::div(random_expression(rng, vars, depth - 1), divisor);
        }
        default: {
            Expression inner = random_expression(rng, vars, depth - 1);
            if (inner.kind() == Expression::Kind::Neg) return inner;
            return Expression::neg(inner);
        }
    }
}

}  // namespace mwp::testing
