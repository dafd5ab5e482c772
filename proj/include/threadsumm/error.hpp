#pragma once

#include <stdexcept>
#include <string>

namespace threadsumm {

enum class ErrorKind {
  Parse,             // malformed input document
  ReferentialIntegrity,
  Structure,         // cycles, multiple roots
  EmptyInput,
  Config,            // bad provider/run configuration, usage errors
  Transport,         // network failure after retries exhausted
  EmptyResponse,
  ProviderContract,  // e.g. embedding dimension mismatch in a batch
  ScriptedGap,       // mock provider had no matching script entry
  Planning,          // zero aspects / zero ACUs
  OrderingParse,
  Step,              // every candidate in a ToT step discarded
  Metric,            // undefined metric (empty reference, zero aspects)
  Parameter,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::ReferentialIntegrity: return "referential-integrity";
    case ErrorKind::Structure: return "structure";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::Config: return "config";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::EmptyResponse: return "empty-response";
    case ErrorKind::ProviderContract: return "provider-contract";
    case ErrorKind::ScriptedGap: return "scripted-gap";
    case ErrorKind::Planning: return "planning";
    case ErrorKind::OrderingParse: return "ordering-parse";
    case ErrorKind::Step: return "step";
    case ErrorKind::Metric: return "metric";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace threadsumm
