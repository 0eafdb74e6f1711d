#include "ipkit/remote_scorer.hpp"

#include "ipkit/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace ipkit {

namespace {

using json = nlohmann::json;

struct Attempt {
    enum class Outcome { Ok, Retry, Fatal } outcome;
    std::string message;
    std::vector<double> scores;
};

Attempt parse_reply(const httplib::Result& res, std::size_t expected) {
    if (!res) return {Attempt::Outcome::Retry, "request failed: " + httplib::to_string(res.error()), {}};
    const int status = res->status;
    if (status != 200) {
        std::string detail;
        try {
            const auto body = json::parse(res->body);
            if (body.is_object() && body.contains("error") && body["error"].is_string())
                detail = body["error"].get<std::string>();
        } catch (const json::exception&) {
        }
        std::string msg = "scorer answered HTTP " + std::to_string(status);
        if (!detail.empty()) msg += ": " + detail;
        const bool transient = status >= 500 || status == 429 || status == 408;
        return {transient ? Attempt::Outcome::Retry : Attempt::Outcome::Fatal, msg, {}};
    }

    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::exception&) {
        return {Attempt::Outcome::Fatal, "response body is not JSON", {}};
    }
    if (!body.is_object() || !body.contains("scores") || !body["scores"].is_array())
        return {Attempt::Outcome::Fatal, "response lacks a 'scores' array", {}};
    const auto& arr = body["scores"];
    if (arr.size() != expected)
        return {Attempt::Outcome::Fatal,
                "expected " + std::to_string(expected) + " scores, got " + std::to_string(arr.size()), {}};
    std::vector<double> scores;
    scores.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) return {Attempt::Outcome::Fatal, "non-numeric score in response", {}};
        const double d = v.get<double>();
        if (!std::isfinite(d)) return {Attempt::Outcome::Fatal, "non-finite score in response", {}};
        scores.push_back(d);
    }
    return {Attempt::Outcome::Ok, {}, std::move(scores)};
}

} // namespace

RemoteScorer::RemoteScorer(std::string url, RemoteOptions options)
    : url_(std::move(url)), options_(options) {
    if (options_.batch_size == 0) throw ValidationError("remote scorer batch size must be positive");
    if (options_.max_in_flight == 0) throw ValidationError("remote scorer in-flight limit must be positive");
    if (options_.timeout_ms <= 0) throw ValidationError("remote scorer timeout must be positive");
    if (options_.max_retries < 0 || options_.backoff_ms < 0)
        throw ValidationError("remote scorer retry settings must be non-negative");

    const auto scheme_end = url_.find("://");
    if (scheme_end == std::string::npos || url_.substr(0, scheme_end) != "http")
        throw ValidationError("remote scorer URL must start with http:// (got '" + url_ + "')");
    const auto path_start = url_.find('/', scheme_end + 3);
    host_ = url_.substr(0, path_start);
    if (host_.size() == scheme_end + 3) throw ValidationError("remote scorer URL has no host");
    std::string base = path_start == std::string::npos ? "" : url_.substr(path_start);
    while (!base.empty() && base.back() == '/') base.pop_back();
    path_ = base.ends_with("/score") ? base : base + "/score";
}

std::string RemoteScorer::describe() const { return "remote(" + host_ + path_ + ")"; }

std::vector<double> RemoteScorer::post_batch(std::span<const std::string> sentences,
                                             std::size_t offset) const {
    httplib::Client client(host_);
    const auto timeout = std::chrono::milliseconds(options_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const std::string body = json{{"sentences", sentences}}.dump();
    int delay = options_.backoff_ms;
    std::string last;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            delay *= 2;
        }
        auto reply = parse_reply(client.Post(path_, body, "application/json"), sentences.size());
        if (reply.outcome == Attempt::Outcome::Ok) return std::move(reply.scores);
        if (reply.outcome == Attempt::Outcome::Fatal) throw ProtocolError(reply.message, offset);
        last = std::move(reply.message);
    }
    throw TransportError(last + " (after " + std::to_string(options_.max_retries + 1) +
                             " attempts to " + host_ + path_ + ")",
                         offset);
}

std::vector<double> RemoteScorer::score_texts(std::span<const std::string> sentences) const {
    std::vector<double> out(sentences.size());
    const std::size_t batches = (sentences.size() + options_.batch_size - 1) / options_.batch_size;
    if (batches == 0) return out;

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::exception_ptr first_error;
    std::size_t first_error_batch = batches;

    auto work = [&] {
        for (std::size_t b = next++; b < batches && !failed; b = next++) {
            const std::size_t lo = b * options_.batch_size;
            const std::size_t hi = std::min(sentences.size(), lo + options_.batch_size);
            try {
                auto scores = post_batch(sentences.subspan(lo, hi - lo), lo);
                std::copy(scores.begin(), scores.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
            } catch (...) {
                failed = true;
                std::lock_guard lock(err_mu);
                if (b < first_error_batch) {
                    first_error_batch = b;
                    first_error = std::current_exception();
                }
            }
        }
    };

    const std::size_t threads = std::min(options_.max_in_flight, batches);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::vector<double> RemoteScorer::score_batch(std::span<const Tokens> batch) const {
    std::vector<std::string> texts;
    texts.reserve(batch.size());
    for (const auto& t : batch) texts.push_back(detokenize(t));
    return score_texts(texts);
}

double RemoteScorer::score(const Tokens& tokens) const {
    return score_batch(std::span<const Tokens>(&tokens, 1)).front();
}

} // namespace ipkit
