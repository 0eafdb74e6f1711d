#pragma once

#include "ipkit/lm.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ipkit {

struct RemoteOptions {
    int timeout_ms = 10000;        // per request: connect, read and write
    int max_retries = 2;           // extra attempts after the first
    int backoff_ms = 100;          // doubled after every failed attempt
    std::size_t batch_size = 32;
    std::size_t max_in_flight = 4; // concurrent batches
};

/// Client for an HTTP scoring service.
///
/// POST {base}/score with {"sentences": [...]} and expect {"scores": [...]}
/// of equal length. Connection failures, timeouts and 5xx answers are retried
/// with exponential backoff and surface as TransportError once retries are
/// exhausted. A 4xx answer, malformed JSON or a count mismatch is a
/// ProtocolError and is not retried.
class RemoteScorer final : public SentenceScorer {
public:
    /// `url` is `http://host[:port][/base]`.
    explicit RemoteScorer(std::string url, RemoteOptions options = {});

    double score(const Tokens& tokens) const override;
    std::vector<double> score_batch(std::span<const Tokens> batch) const override;
    std::string describe() const override;

    /// Scores already-detokenized sentences.
    std::vector<double> score_texts(std::span<const std::string> sentences) const;

    const std::string& endpoint() const noexcept { return host_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::vector<double> post_batch(std::span<const std::string> sentences, std::size_t offset) const;

    std::string url_;
    std::string host_;  // scheme://host:port
    std::string path_;  // .../score
    RemoteOptions options_;
};

} // namespace ipkit
