#ifndef BSPEC_ERRORS_HPP
#define BSPEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bspec {

// Root of all domain errors.  The CLI maps these to exit code 1; bad usage
// (unknown flags, missing files, precondition misuse) maps to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated a documented precondition (r < 3, rho out of range, ...).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error("precondition: " + msg) {}
};

class OverlappingObstacles : public Error {
public:
    int i, j;
    OverlappingObstacles(int i_, int j_)
        : Error("OverlappingObstacles(" + std::to_string(i_ + 1) + "," + std::to_string(j_ + 1) +
                "): obstacle closures intersect"),
          i(i_), j(j_) {}
};

// Obstacle k meets the convex hull of obstacles i and j (condition (1.1)),
// or sits inside the hull of all the others (i, j then name the two
// support-active hull obstacles).
class EclipseViolation : public Error {
public:
    int i, j, k;
    EclipseViolation(int i_, int j_, int k_)
        : Error("EclipseViolation(" + std::to_string(i_ + 1) + "," + std::to_string(j_ + 1) + "," +
                std::to_string(k_ + 1) + "): obstacle meets convex hull"),
          i(i_), j(j_), k(k_) {}
};

class CapacityExceeded : public Error {
public:
    explicit CapacityExceeded(const std::string& msg) : Error("capacity exceeded: " + msg) {}
};

class NonConvergence : public Error {
public:
    std::string config_token;
    explicit NonConvergence(const std::string& token)
        : Error("NonConvergence(" + token + "): orbit solver hit the iteration cap"),
          config_token(token) {}
};

class ValidationFailure : public Error {
public:
    std::string invariant;
    ValidationFailure(const std::string& invariant_, const std::string& detail)
        : Error("ValidationFailure(" + invariant_ + "): " + detail), invariant(invariant_) {}
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error("insufficient data: " + msg) {}
};

class NoWitness : public Error {
public:
    double q;
    explicit NoWitness(double q_)
        : Error("NoWitness(q=" + std::to_string(q_) + "): no isolated even orbit in the interval"),
          q(q_) {}
};

// Bump window too sharp to represent (support narrower than 1e-300).
class WindowUnderflow : public Error {
public:
    explicit WindowUnderflow(const std::string& msg) : Error("window underflow: " + msg) {}
};

class ParseError : public Error {
public:
    int line;
    ParseError(int line_, const std::string& msg)
        : Error("ParseError(line " + std::to_string(line_) + "): " + msg), line(line_) {}
};

class HashMismatch : public Error {
public:
    explicit HashMismatch(const std::string& msg) : Error("HashMismatch: " + msg) {}
};

}

#endif
