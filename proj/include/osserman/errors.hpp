#pragma once

#include <stdexcept>
#include <string>

namespace osserman {

/// Base class for every error this library raises on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- expression language ---

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::string expected, const std::string& what)
        : Error(what), offset_(offset), expected_(std::move(expected)) {}
    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;  // human-readable expected-token set
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("empty expression") {}
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}
    const std::string& name() const { return name_; }
    std::size_t offset() const { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

class MissingBinding : public Error {
public:
    explicit MissingBinding(const std::string& var)
        : Error("no binding for variable '" + var + "'") {}
};

class NonDifferentiableNode : public Error {
public:
    explicit NonDifferentiableNode(const std::string& what) : Error(what) {}
};

// --- numerics ---

class QuadratureError : public Error {
public:
    explicit QuadratureError(const std::string& what) : Error(what) {}
};

class TailDiverges : public Error {
public:
    explicit TailDiverges(const std::string& what) : Error(what) {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& what) : Error(what) {}
};

class InconclusiveError : public Error {
public:
    explicit InconclusiveError(const std::string& what) : Error(what) {}
};

// --- mesh / solver ---

class BadGrading : public Error {
public:
    explicit BadGrading(const std::string& what) : Error(what) {}
};

class MeshMismatch : public Error {
public:
    explicit MeshMismatch(const std::string& what) : Error(what) {}
};

class NegativeState : public Error {
public:
    NegativeState(int node, double u, double v)
        : Error("state non-positive at node " + std::to_string(node) +
                " (u=" + std::to_string(u) + ", v=" + std::to_string(v) + ")"),
          node_(node) {}
    int node() const { return node_; }

private:
    int node_;
};

class SingularJacobian : public Error {
public:
    explicit SingularJacobian(int iteration)
        : Error("singular Jacobian at Newton iteration " + std::to_string(iteration)),
          iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

// --- drivers ---

class CampaignError : public Error {
public:
    explicit CampaignError(const std::string& what) : Error(what) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

class BarrierFailure : public CampaignError {
public:
    explicit BarrierFailure(const std::string& what) : CampaignError(what) {}
};

class CertificateFailure : public CampaignError {
public:
    explicit CertificateFailure(const std::string& what) : CampaignError(what) {}
};

class MonotonicityViolation : public CampaignError {
public:
    MonotonicityViolation(int level, const std::string& what)
        : CampaignError(what), level_(level) {}
    int level() const { return level_; }

private:
    int level_;
};

class BoundTrespass : public CampaignError {
public:
    explicit BoundTrespass(const std::string& what) : CampaignError(what) {}
};

class BarrierOrderViolation : public CampaignError {
public:
    explicit BarrierOrderViolation(const std::string& what) : CampaignError(what) {}
};

class SlowDecay : public CampaignError {
public:
    explicit SlowDecay(const std::string& what) : CampaignError(what) {}
};

class WindowTooSparse : public Error {
public:
    explicit WindowTooSparse(const std::string& what) : Error(what) {}
};

// --- problem files ---

class ProblemFileError : public Error {
public:
    explicit ProblemFileError(const std::string& what) : Error(what) {}
};

}  // namespace osserman
