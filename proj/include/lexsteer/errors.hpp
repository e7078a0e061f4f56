#pragma once

#include <stdexcept>

namespace lexsteer {

// Base class for everything the library throws. The CLI maps any Error to a
// one-line diagnostic and a nonzero exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad corpus layout, missing class directories, unknown class names.
struct ConfigError : Error { using Error::Error; };

// Out-of-range argument (alpha <= 0, tau <= 0, empty threshold list, ...).
struct ParameterError : Error { using Error::Error; };

// Unreadable document contents: malformed UTF-8, non-integer id fields.
struct IngestionError : Error { using Error::Error; };

// Malformed table/report/model file; message carries the line number.
struct ParseError : Error { using Error::Error; };

// Formula domain violation (non-positive log-odds denominator, non-finite logits).
struct NumericalError : Error { using Error::Error; };

// Vector length mismatch between logits and bias.
struct ShapeError : Error { using Error::Error; };

// A logit provider broke its contract (wrong-length rows, non-finite values).
struct ProviderError : Error { using Error::Error; };

// Subprocess provider framing errors: bad handshake, malformed responses.
struct ProtocolError : ProviderError { using ProviderError::ProviderError; };

// Vocabulary fingerprint mismatch between artifacts that must share a vocab.
struct IncompatibilityError : Error { using Error::Error; };

// Invariant breach inside the library; indicates a bug, not bad input.
struct InternalError : Error { using Error::Error; };

}  // namespace lexsteer
