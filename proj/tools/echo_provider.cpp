// Reference external logit provider for the subprocess protocol. Emits a
// synthetic vocabulary in its handshake, then answers each request with
// deterministic integer-derived logits:
//
//   base      = sum over committed ids of (id + 1), mod 97
//   logit[v]  = 0.25 * (((pos + 1) * 31 + v * 7 + base) % 41) - 5.0
//
// The rule is exact in double precision, so a test harness can recompute the
// expected values independently. --misbehave modes deliberately break the
// protocol for adapter error-path tests.

#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct Options {
    int vocab_size = 8;  // real tokens; mask/eos/pad are appended after them
    std::string misbehave = "none";
};

double echo_logit(int64_t pos, int64_t v, int64_t base) {
    return 0.25 * static_cast<double>(((pos + 1) * 31 + v * 7 + base) % 41) - 5.0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--vocab-size" && i + 1 < argc) {
            opt.vocab_size = std::stoi(argv[++i]);
        } else if (arg == "--misbehave" && i + 1 < argc) {
            opt.misbehave = argv[++i];
        } else {
            std::fprintf(stderr, "usage: echo_provider [--vocab-size N] "
                                 "[--misbehave none|bad-json|wrong-id|short-logits|nonfinite]\n");
            return 2;
        }
    }
    if (opt.vocab_size < 1) {
        std::fprintf(stderr, "echo_provider: vocab size must be >= 1\n");
        return 2;
    }

    std::vector<std::string> vocab;
    for (int v = 0; v < opt.vocab_size; ++v) vocab.push_back("tok" + std::to_string(v));
    vocab.push_back("<mask>");
    vocab.push_back("</s>");
    vocab.push_back("<pad>");
    const int total = opt.vocab_size + 3;
    json handshake = {
        {"vocab", vocab},
        {"special",
         {{"mask", opt.vocab_size}, {"eos", opt.vocab_size + 1}, {"pad", opt.vocab_size + 2}}},
    };
    std::cout << handshake.dump() << "\n" << std::flush;

    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        json request = json::parse(line);
        const int64_t id = request.at("id").get<int64_t>();
        const auto seq = request.at("seq").get<std::vector<int64_t>>();
        const auto positions = request.at("positions").get<std::vector<int64_t>>();

        if (opt.misbehave == "bad-json") {
            std::cout << "this is not json\n" << std::flush;
            continue;
        }

        int64_t base = 0;
        for (int64_t t : seq) {
            if (t >= 0) base = (base + t + 1) % 97;
        }
        json rows = json::array();
        for (int64_t pos : positions) {
            json row = json::array();
            for (int v = 0; v < total; ++v) row.push_back(echo_logit(pos, v, base));
            if (opt.misbehave == "nonfinite" && !row.empty()) row[0] = "inf";
            rows.push_back(std::move(row));
        }
        if (opt.misbehave == "short-logits" && !rows.empty()) rows.erase(rows.size() - 1);
        json response = {
            {"id", opt.misbehave == "wrong-id" ? id + 1 : id},
            {"logits", rows},
        };
        std::cout << response.dump() << "\n" << std::flush;
    }
    return 0;
}
