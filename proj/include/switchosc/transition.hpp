#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace switchosc {

// Smooth monotone transition psi on [-1, 1], extended by +-1 outside.
class TransitionFunction {
public:
    using Scalar = std::function<double(double)>;

    struct Validation {
        bool ok = true;
        std::vector<std::string> failures;
        std::vector<std::string> notes;
    };

    static std::shared_ptr<const TransitionFunction> cubic();
    static std::shared_ptr<const TransitionFunction> sine();
    // psi(v) = sum c_k v^k; validated, throws DomainError on failure.
    static std::shared_ptr<const TransitionFunction> polynomial(std::vector<double> coefficients,
                                                                std::string id = "polynomial");
    // JSON: {"type": "cubic"|"sine"|"polynomial", "coefficients": [...]}
    static std::shared_ptr<const TransitionFunction> from_json_text(const std::string& text);
    static std::shared_ptr<const TransitionFunction> from_file(const std::string& path);

    TransitionFunction(std::string id, Scalar psi, Scalar psi_prime, Scalar psi_second);

    const std::string& id() const { return id_; }
    bool is_cubic() const { return id_ == "cubic"; }

    double psi(double v) const;
    double psi_prime(double v) const;
    double psi_second(double v) const;
    // Solves psi(v) = lambda on [-1, 1], safeguarded Newton, |dv| < 1e-13.
    double inverse(double lambda) const;

    Validation validate(int samples = 2001) const;

private:
    std::string id_;
    Scalar psi_;
    Scalar psi_prime_;
    Scalar psi_second_;
};

}  // namespace switchosc
