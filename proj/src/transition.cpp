#include "switchosc/transition.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "switchosc/core.hpp"
#include "switchosc/errors.hpp"

namespace switchosc {

TransitionFunction::TransitionFunction(std::string id, Scalar psi, Scalar psi_prime, Scalar psi_second)
    : id_(std::move(id)), psi_(std::move(psi)), psi_prime_(std::move(psi_prime)),
      psi_second_(std::move(psi_second)) {}

std::shared_ptr<const TransitionFunction> TransitionFunction::cubic() {
    static const auto instance = std::make_shared<const TransitionFunction>(
        "cubic", [](double v) { return 0.5 * v * (3.0 - v * v); },
        [](double v) { return 1.5 * (1.0 - v * v); }, [](double v) { return -3.0 * v; });
    return instance;
}

std::shared_ptr<const TransitionFunction> TransitionFunction::sine() {
    return std::make_shared<const TransitionFunction>(
        "sine", [](double v) { return std::sin(0.5 * kPi * v); },
        [](double v) { return 0.5 * kPi * std::cos(0.5 * kPi * v); },
        [](double v) { return -0.25 * kPi * kPi * std::sin(0.5 * kPi * v); });
}

std::shared_ptr<const TransitionFunction> TransitionFunction::polynomial(std::vector<double> c, std::string id) {
    if (c.empty()) throw DomainError("polynomial transition needs coefficients");
    auto eval = [c](double v) {
        double s = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * v + *it;
        return s;
    };
    std::vector<double> d1, d2;
    for (std::size_t k = 1; k < c.size(); ++k) d1.push_back(static_cast<double>(k) * c[k]);
    for (std::size_t k = 1; k < d1.size(); ++k) d2.push_back(static_cast<double>(k) * d1[k]);
    auto horner = [](std::vector<double> coeffs) {
        return [coeffs](double v) {
            double s = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * v + *it;
            return s;
        };
    };
    auto fn = std::make_shared<const TransitionFunction>(std::move(id), eval, horner(d1), horner(d2));
    auto report = fn->validate();
    if (!report.ok) {
        std::string msg = "transition function fails property checks:";
        for (const auto& f : report.failures) msg += " " + f + ";";
        throw DomainError(msg);
    }
    return fn;
}

std::shared_ptr<const TransitionFunction> TransitionFunction::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("transition file is not valid JSON: ") + e.what());
    }
    const std::string type = j.value("type", std::string("polynomial"));
    if (type == "cubic") return cubic();
    if (type == "sine") return sine();
    if (type == "polynomial") {
        if (!j.contains("coefficients") || !j["coefficients"].is_array())
            throw DomainError("polynomial transition needs a 'coefficients' array");
        return polynomial(j["coefficients"].get<std::vector<double>>(), j.value("id", std::string("user")));
    }
    throw DomainError("unknown transition type: " + type);
}

std::shared_ptr<const TransitionFunction> TransitionFunction::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open transition file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

double TransitionFunction::psi(double v) const {
    if (v >= 1.0) return 1.0;
    if (v <= -1.0) return -1.0;
    return psi_(v);
}

double TransitionFunction::psi_prime(double v) const {
    if (std::fabs(v) >= 1.0) return 0.0;
    return psi_prime_(v);
}

double TransitionFunction::psi_second(double v) const {
    if (std::fabs(v) > 1.0) return 0.0;
    return psi_second_(v);
}

double TransitionFunction::inverse(double lambda) const {
    if (!(std::fabs(lambda) <= 1.0)) throw DomainError("psi inverse needs |lambda| <= 1");
    if (lambda == 1.0) return 1.0;
    if (lambda == -1.0) return -1.0;
    double lo = -1.0, hi = 1.0;
    double v = lambda;  // psi'(0) = O(1) for admissible psi
    for (int it = 0; it < 200; ++it) {
        const double r = psi_(v) - lambda;
        if (r == 0.0) return v;
        if (r > 0.0) hi = v; else lo = v;
        if (hi - lo < 1e-15) break;
        const double d = psi_prime_(v);
        double next = d > 0.0 ? v - r / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - v) < 1e-14) { v = next; break; }
        v = next;
    }
    return v;
}

TransitionFunction::Validation TransitionFunction::validate(int samples) const {
    Validation out;
    auto fail = [&](std::string s) { out.ok = false; out.failures.push_back(std::move(s)); };
    if (std::fabs(psi_(1.0) - 1.0) > 1e-12) fail("psi(1) != 1");
    if (std::fabs(psi_(-1.0) + 1.0) > 1e-12) fail("psi(-1) != -1");
    for (int i = 1; i < samples - 1; ++i) {
        const double v = -1.0 + 2.0 * i / (samples - 1);
        if (!(psi_prime_(v) > 0.0)) {
            std::ostringstream os;
            os << "psi' not positive at v=" << v;
            fail(os.str());
            break;
        }
    }
    double prev = psi_(-1.0);
    for (int i = 1; i < samples; ++i) {
        const double v = -1.0 + 2.0 * i / (samples - 1);
        const double cur = psi_(v);
        if (!(cur > prev)) { fail("psi not strictly increasing"); break; }
        prev = cur;
    }
    if (!(psi_second_(1.0) < 0.0)) fail("psi''(1) must be negative");
    if (!(psi_second_(-1.0) > 0.0)) fail("psi''(-1) must be positive");
    if (std::fabs(psi_prime_(1.0)) > 1e-12 || std::fabs(psi_prime_(-1.0)) > 1e-12)
        out.notes.push_back("psi'(+-1) != 0: the layer field is not C1 across |v| = 1");
    return out;
}

}  // namespace switchosc
