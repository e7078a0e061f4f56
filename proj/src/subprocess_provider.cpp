#include "lexsteer/subprocess_provider.hpp"

#include "lexsteer/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <csignal>
#include <cmath>
#include <cstring>
#include <mutex>

#include <sys/wait.h>
#include <unistd.h>

namespace lexsteer {

using nlohmann::json;

namespace {

// A dead child would otherwise raise SIGPIPE on write and kill the parent.
void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

SubprocessProvider::SubprocessProvider(const std::string& command) {
    ignore_sigpipe_once();
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw ProtocolError("failed to create pipes for provider subprocess");
    }
    pid_ = fork();
    if (pid_ < 0) {
        throw ProtocolError("failed to fork provider subprocess");
    }
    if (pid_ == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = fdopen(to_child[1], "w");
    from_child_ = fdopen(from_child[0], "r");
    if (!to_child_ || !from_child_) {
        shutdown();
        throw ProtocolError("failed to open provider subprocess streams");
    }

    std::string line = read_line();
    json handshake;
    try {
        handshake = json::parse(line);
    } catch (const json::exception& e) {
        shutdown();
        throw ProtocolError(fmt::format("provider handshake is not valid JSON: {}", e.what()));
    }
    try {
        if (!handshake.at("vocab").is_array() || handshake.at("vocab").empty()) {
            throw ProtocolError("provider handshake has an empty vocab");
        }
        for (const auto& tok : handshake.at("vocab")) {
            std::string s = tok.get<std::string>();
            TokenId id = vocab_.intern(s);
            if (id != vocab_.size() - 1) {
                throw ProtocolError(fmt::format("provider vocab has duplicate token '{}'", s));
            }
        }
        const auto& special = handshake.at("special");
        vocab_.set_special(SpecialRole::mask, special.at("mask").get<TokenId>());
        vocab_.set_special(SpecialRole::eos, special.at("eos").get<TokenId>());
        vocab_.set_special(SpecialRole::pad, special.at("pad").get<TokenId>());
    } catch (const json::exception& e) {
        shutdown();
        throw ProtocolError(fmt::format("provider handshake is malformed: {}", e.what()));
    } catch (const ParameterError& e) {
        shutdown();
        throw ProtocolError(fmt::format("provider handshake special ids invalid: {}", e.what()));
    }
}

SubprocessProvider::~SubprocessProvider() {
    shutdown();
}

void SubprocessProvider::shutdown() {
    if (to_child_) {
        fclose(to_child_);
        to_child_ = nullptr;
    }
    if (from_child_) {
        fclose(from_child_);
        from_child_ = nullptr;
    }
    if (pid_ > 0) {
        int status = 0;
        // Closing stdin asks the child to exit; escalate if it does not.
        for (int tries = 0; tries < 20; ++tries) {
            pid_t done = waitpid(pid_, &status, WNOHANG);
            if (done == pid_ || done < 0) {
                pid_ = -1;
                return;
            }
            usleep(100 * 1000);
        }
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

std::string SubprocessProvider::read_line() {
    if (!from_child_) {
        throw ProtocolError("provider stream is closed");
    }
    std::string line;
    int c;
    while ((c = fgetc(from_child_)) != EOF) {
        if (c == '\n') return line;
        line.push_back(static_cast<char>(c));
    }
    throw ProtocolError("provider closed its output stream");
}

std::vector<std::vector<double>> SubprocessProvider::logits(std::span<const TokenId> seq,
                                                            std::span<const int32_t> positions) {
    const int64_t request_id = next_request_id_++;
    json request = {
        {"id", request_id},
        {"seq", std::vector<TokenId>(seq.begin(), seq.end())},
        {"positions", std::vector<int32_t>(positions.begin(), positions.end())},
    };
    std::string line = request.dump();
    line.push_back('\n');
    if (!to_child_ || fwrite(line.data(), 1, line.size(), to_child_) != line.size() ||
        fflush(to_child_) != 0) {
        throw ProtocolError("failed to write request to provider subprocess");
    }

    json response;
    try {
        response = json::parse(read_line());
    } catch (const json::exception& e) {
        throw ProtocolError(fmt::format("provider response is not valid JSON: {}", e.what()));
    }
    std::vector<std::vector<double>> rows;
    try {
        if (response.at("id").get<int64_t>() != request_id) {
            throw ProtocolError(fmt::format("provider answered request {} with id {}", request_id,
                                            response.at("id").get<int64_t>()));
        }
        const auto& logits = response.at("logits");
        if (!logits.is_array() || logits.size() != positions.size()) {
            throw ProtocolError(fmt::format("provider returned {} logit rows for {} positions",
                                            logits.size(), positions.size()));
        }
        for (const auto& row : logits) {
            if (!row.is_array() || static_cast<int32_t>(row.size()) != vocab_.size()) {
                throw ProtocolError(fmt::format(
                    "provider returned a logit row of length {} for vocabulary of size {}",
                    row.size(), vocab_.size()));
            }
            std::vector<double> values;
            values.reserve(row.size());
            for (const auto& x : row) {
                if (!x.is_number()) {
                    throw ProtocolError("provider returned a non-numeric logit");
                }
                values.push_back(x.get<double>());
            }
            rows.push_back(std::move(values));
        }
    } catch (const json::exception& e) {
        throw ProtocolError(fmt::format("provider response is malformed: {}", e.what()));
    }
    return rows;
}

}  // namespace lexsteer
