#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcwb {

enum class ErrorKind {
	NotHermitian,
	NoConvergence,
	NotPositive,
	GapTooSmall,
	DimMismatch,
	FactorizationResidualTooLarge,
	SupportViolation,
	NotOrthogonal,
	SyntaxError,
	ValidationError,
	NotHermitianAtFnApp,
	UnboundVariable,
	SamplerExhausted,
	SpectralGapFailure,
	ResidualTooLarge,
	NoWorkableTheta,
	LiftResidual,
	EndpointDefect,
	WindingIllConditioned,
	NoSpectralGap,
	MalformedInput,
};

constexpr std::string_view to_string(ErrorKind kind) {
	switch (kind) {
	case ErrorKind::NotHermitian: return "NotHermitian";
	case ErrorKind::NoConvergence: return "NoConvergence";
	case ErrorKind::NotPositive: return "NotPositive";
	case ErrorKind::GapTooSmall: return "GapTooSmall";
	case ErrorKind::DimMismatch: return "DimMismatch";
	case ErrorKind::FactorizationResidualTooLarge: return "FactorizationResidualTooLarge";
	case ErrorKind::SupportViolation: return "SupportViolation";
	case ErrorKind::NotOrthogonal: return "NotOrthogonal";
	case ErrorKind::SyntaxError: return "SyntaxError";
	case ErrorKind::ValidationError: return "ValidationError";
	case ErrorKind::NotHermitianAtFnApp: return "NotHermitianAtFnApp";
	case ErrorKind::UnboundVariable: return "UnboundVariable";
	case ErrorKind::SamplerExhausted: return "SamplerExhausted";
	case ErrorKind::SpectralGapFailure: return "SpectralGapFailure";
	case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
	case ErrorKind::NoWorkableTheta: return "NoWorkableTheta";
	case ErrorKind::LiftResidual: return "LiftResidual";
	case ErrorKind::EndpointDefect: return "EndpointDefect";
	case ErrorKind::WindingIllConditioned: return "WindingIllConditioned";
	case ErrorKind::NoSpectralGap: return "NoSpectralGap";
	case ErrorKind::MalformedInput: return "MalformedInput";
	}
	return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
public:
	Error(ErrorKind kind, const std::string& what)
		: std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

	ErrorKind kind() const noexcept { return kind_; }

private:
	ErrorKind kind_;
};

/// Parse failure with a 1-based source location.
class SyntaxError : public Error {
public:
	SyntaxError(const std::string& what, int line, int column)
		: Error(ErrorKind::SyntaxError,
		        what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
		  line_(line), column_(column) {}

	int line() const noexcept { return line_; }
	int column() const noexcept { return column_; }

private:
	int line_;
	int column_;
};

} // namespace qcwb
