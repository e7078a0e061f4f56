#pragma once

#include "lexsteer/provider.hpp"

#include <cstdio>
#include <string>

#include <sys/types.h>

namespace lexsteer {

// Logit provider backed by a child process speaking line-delimited JSON over
// its standard streams.
//
//   handshake (child -> parent, first line):
//     {"vocab": ["tok", ...], "special": {"mask": id, "eos": id, "pad": id}}
//   request (parent -> child, one line per call):
//     {"id": n, "seq": [ints, -1 for masked], "positions": [ints]}
//   response (child -> parent):
//     {"id": n, "logits": [[floats], ...]}  # one row per requested position
//
// Any malformed line aborts the decode with a ProtocolError.
class SubprocessProvider final : public LogitProvider {
  public:
    // The command is run via `sh -c`.
    explicit SubprocessProvider(const std::string& command);
    ~SubprocessProvider() override;

    SubprocessProvider(const SubprocessProvider&) = delete;
    SubprocessProvider& operator=(const SubprocessProvider&) = delete;

    const Vocab& vocab() const override { return vocab_; }

    std::vector<std::vector<double>> logits(std::span<const TokenId> seq,
                                            std::span<const int32_t> positions) override;

  private:
    std::string read_line();
    void shutdown();

    pid_t pid_ = -1;
    FILE* to_child_ = nullptr;
    FILE* from_child_ = nullptr;
    Vocab vocab_;
    int64_t next_request_id_ = 0;
};

}  // namespace lexsteer
