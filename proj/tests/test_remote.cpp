#include "ipkit/errors.hpp"
#include "ipkit/remote_scorer.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <thread>

using namespace ipkit;
using json = nlohmann::json;

namespace {

// Deterministic, non-trivial score so exactness can be checked.
double stub_score(const std::string& s) { return -static_cast<double>(s.size()) / 3.0 - 0.1; }

class StubServer {
public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    explicit StubServer(Handler h, const std::string& path = "/score") {
        server_.Post(path, [this, h](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            {
                std::lock_guard lock(mu_);
                bodies.push_back(req.body);
            }
            h(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() { stop(); }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string url(const std::string& base = "") const { return "http://127.0.0.1:" + std::to_string(port_) + base; }

    std::atomic<int> hits{0};
    std::vector<std::string> bodies;

private:
    httplib::Server server_;
    std::thread thread_;
    std::mutex mu_;
    int port_ = 0;
};

void echo(const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    json scores = json::array();
    for (const auto& s : body.at("sentences")) scores.push_back(stub_score(s.get<std::string>()));
    res.set_content(json{{"scores", scores}}.dump(), "application/json");
}

RemoteOptions fast() {
    RemoteOptions o;
    o.timeout_ms = 2000;
    o.backoff_ms = 1;
    return o;
}

std::vector<std::string> sentences(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("sentence number " + std::string(i, 'x'));
    return out;
}

} // namespace

TEST_CASE("scores come back aligned and bit-exact across batches") {
    StubServer server(echo);
    auto o = fast();
    o.batch_size = 3;
    o.max_in_flight = 4;
    RemoteScorer scorer(server.url(), o);
    const auto in = sentences(20);
    const auto got = scorer.score_texts(in);
    REQUIRE(got.size() == in.size());
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(got[i] == stub_score(in[i]));
    CHECK(server.hits == 7);

    // Token input is detokenized before sending.
    const Tokens toks{"I", "do", "n't", "know", "."};
    CHECK(scorer.score(toks) == stub_score("I don't know."));
    CHECK(scorer.score_texts({}).empty());
}

TEST_CASE("request body follows the wire format") {
    StubServer server(echo, "/v1/score");
    RemoteScorer scorer(server.url("/v1/"), fast());
    CHECK(scorer.path() == "/v1/score");
    const std::vector<std::string> in{"Anyone home?", "Say \"hi\""};
    scorer.score_texts(in);
    REQUIRE(server.bodies.size() == 1);
    CHECK(json::parse(server.bodies[0]) == json{{"sentences", in}});
}

TEST_CASE("count mismatch is a protocol error without retry") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"scores":[1.0]})", "application/json");
    });
    RemoteScorer scorer(server.url(), fast());
    CHECK_THROWS_AS(scorer.score_texts(sentences(2)), ProtocolError);
    CHECK(server.hits == 1);
}

TEST_CASE("malformed answers are protocol errors") {
    for (const char* body : {"not json", R"({"nope":[]})", R"({"scores":[null]})", R"({"scores":["1"]})", "[]"}) {
        StubServer server([body](const httplib::Request&, httplib::Response& res) {
            res.set_content(body, "application/json");
        });
        RemoteScorer scorer(server.url(), fast());
        CHECK_THROWS_AS(scorer.score_texts(sentences(1)), ProtocolError);
    }
}

TEST_CASE("4xx answers are not retried") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 400;
        res.set_content(R"({"error":"empty batch"})", "application/json");
    });
    RemoteScorer scorer(server.url(), fast());
    try {
        scorer.score_texts(sentences(1));
        FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
        CHECK(std::string(e.what()).find("empty batch") != std::string::npos);
    }
    CHECK(server.hits == 1);
}

TEST_CASE("transient failures are retried") {
    std::atomic<int> calls{0};
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
        if (calls++ < 2) {
            res.status = 503;
            return;
        }
        echo(req, res);
    });
    auto o = fast();
    o.max_retries = 2;
    RemoteScorer scorer(server.url(), o);
    const auto in = sentences(2);
    CHECK(scorer.score_texts(in) == std::vector<double>{stub_score(in[0]), stub_score(in[1])});
    CHECK(server.hits == 3);
}

TEST_CASE("retries are bounded") {
    StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    auto o = fast();
    o.max_retries = 3;
    RemoteScorer scorer(server.url(), o);
    CHECK_THROWS_AS(scorer.score_texts(sentences(1)), TransportError);
    CHECK(server.hits == 4);
}

TEST_CASE("a slow server times out") {
    StubServer server([](const httplib::Request& req, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(600));
        echo(req, res);
    });
    auto o = fast();
    o.timeout_ms = 100;
    o.max_retries = 0;
    RemoteScorer scorer(server.url(), o);
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(scorer.score_texts(sentences(1)), TransportError);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::milliseconds(550));
}

TEST_CASE("an unreachable host is a transport error") {
    std::string url;
    {
        StubServer server(echo);
        url = server.url();
        server.stop();
    }
    auto o = fast();
    o.max_retries = 1;
    RemoteScorer scorer(url, o);
    CHECK_THROWS_AS(scorer.score_texts(sentences(3)), TransportError);
}

TEST_CASE("errors carry the offset of the failing batch") {
    StubServer server([](const httplib::Request& req, httplib::Response& res) {
        if (req.body.find("poison") != std::string::npos) {
            res.status = 422;
            return;
        }
        echo(req, res);
    });
    auto o = fast();
    o.batch_size = 4;
    o.max_in_flight = 1;
    RemoteScorer scorer(server.url(), o);
    auto in = sentences(12);
    in[9] = "poison";
    try {
        scorer.score_texts(in);
        FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
        CHECK(e.offset() == 8);
    }
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(RemoteScorer("https://example.org"), ValidationError);
    CHECK_THROWS_AS(RemoteScorer("example.org"), ValidationError);
    CHECK_THROWS_AS(RemoteScorer("http://"), ValidationError);
    RemoteOptions o;
    o.batch_size = 0;
    CHECK_THROWS_AS(RemoteScorer("http://localhost:1", o), ValidationError);
    o = {};
    o.timeout_ms = 0;
    CHECK_THROWS_AS(RemoteScorer("http://localhost:1", o), ValidationError);
    RemoteScorer ok("http://localhost:8080/api");
    CHECK(ok.endpoint() == "http://localhost:8080");
    CHECK(ok.path() == "/api/score");
}
