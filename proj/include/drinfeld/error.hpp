#pragma once

#include <stdexcept>
#include <string>

namespace drinfeld {

// Every failure raised by the library derives from one of these. The CLI maps
// parse_error to exit status 3 and precondition_error to exit status 2.

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class field_mismatch : public precondition_error {
public:
    field_mismatch() : precondition_error("operands live over different fields") {}
};

class division_by_zero : public std::domain_error {
public:
    division_by_zero() : std::domain_error("division by zero") {}
};

/// Valuation of zero is +infinity; it is reported as an error rather than a number.
class infinite_valuation : public std::domain_error {
public:
    infinite_valuation() : std::domain_error("valuation of zero is +infinity") {}
};

/// The base point lies in the packet (Phi_Q(beta) == alpha). Carries the
/// annihilator text when the failure is a torsion base point.
class base_in_packet : public precondition_error {
public:
    explicit base_in_packet(const std::string& what) : precondition_error(what) {}
};

class torsion_base : public precondition_error {
public:
    torsion_base(std::string annihilator)
        : precondition_error("base point is torsion, annihilator " + annihilator),
          annihilator_(std::move(annihilator)) {}
    const std::string& annihilator() const noexcept { return annihilator_; }

private:
    std::string annihilator_;
};

}  // namespace drinfeld
