#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>

#include "homectx/ingest.hpp"

namespace homectx {

namespace detail {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

class Registry;

// One client connection. At most one read or write is outstanding, so the
// messages of a connection are handled strictly in arrival order.
class Session : public std::enable_shared_from_this<Session> {
public:
    Session(tcp::socket socket, Engine& engine, Registry& registry)
        : socket_(std::move(socket)), conn_(engine), registry_(registry) {}

    void start();

    // Stops reading; queued replies are still written before closing.
    void shutdown_receive() {
        asio::post(socket_.get_executor(), [self = shared_from_this()] {
            boost::system::error_code ec;
            self->socket_.shutdown(tcp::socket::shutdown_receive, ec);
        });
    }

private:
    void read() {
        asio::async_read_until(socket_, buffer_, '\n',
                               [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
                                   self->on_read(ec, n);
                               });
    }

    void on_read(boost::system::error_code ec, std::size_t n) {
        if (ec) return finish();
        std::string line(asio::buffers_begin(buffer_.data()), asio::buffers_begin(buffer_.data()) + n);
        buffer_.consume(n);
        if (!line.empty() && line.back() == '\n') line.pop_back();
        out_.clear();
        for (const auto& reply : conn_.process(line)) out_ += Connection::encode(reply) + '\n';
        if (out_.empty()) return read();
        asio::async_write(socket_, asio::buffer(out_),
                          [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                              if (ec || self->conn_.closed()) return self->finish();
                              self->read();
                          });
    }

    void finish();

    tcp::socket socket_;
    asio::streambuf buffer_;
    std::string out_;
    Connection conn_;
    Registry& registry_;
};

class Registry {
public:
    void add(const std::shared_ptr<Session>& s) {
        std::lock_guard lock(mu_);
        sessions_.insert(s);
        if (stopping_) s->shutdown_receive();
    }
    void remove(const std::shared_ptr<Session>& s) {
        std::lock_guard lock(mu_);
        sessions_.erase(s);
    }
    void shutdown_all() {
        std::lock_guard lock(mu_);
        stopping_ = true;
        for (const auto& s : sessions_) s->shutdown_receive();
    }

private:
    std::mutex mu_;
    std::set<std::shared_ptr<Session>> sessions_;
    bool stopping_ = false;
};

inline void Session::start() {
    asio::dispatch(socket_.get_executor(), [self = shared_from_this()] {
        self->registry_.add(self);
        self->read();
    });
}

inline void Session::finish() {
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
    registry_.remove(shared_from_this());
}

}  // namespace detail

// Line-delimited JSON server in front of an Engine. Connections are served
// concurrently on a small thread pool; the Engine serializes store writes.
class Server {
public:
    Server(Engine& engine, std::string address = "127.0.0.1", std::uint16_t port = 0)
        : engine_(engine), address_(std::move(address)), port_(port), acceptor_(boost::asio::make_strand(io_)) {}

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    ~Server() {
        stop();
        wait();
    }

    // Binds and starts accepting. Throws boost::system::system_error when the
    // address cannot be bound.
    void start(std::size_t threads = 2) {
        namespace asio = boost::asio;
        const detail::tcp::endpoint ep(asio::ip::make_address(address_), port_);
        acceptor_.open(ep.protocol());
        acceptor_.set_option(detail::tcp::acceptor::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
        port_ = acceptor_.local_endpoint().port();
        accept();
        for (std::size_t i = 0; i < std::max<std::size_t>(threads, 1); ++i)
            pool_.emplace_back([this] { io_.run(); });
    }

    std::uint16_t port() const { return port_; }

    // Stops accepting, lets open connections drain their replies, then ends.
    void stop() {
        boost::asio::post(acceptor_.get_executor(), [this] {
            boost::system::error_code ec;
            acceptor_.close(ec);
            registry_.shutdown_all();
        });
    }

    void wait() {
        for (auto& t : pool_)
            if (t.joinable()) t.join();
        pool_.clear();
    }

private:
    void accept() {
        acceptor_.async_accept(boost::asio::make_strand(io_),
                               [this](boost::system::error_code ec, detail::tcp::socket socket) {
                                   if (ec) return;
                                   std::make_shared<detail::Session>(std::move(socket), engine_, registry_)->start();
                                   accept();
                               });
    }

    Engine& engine_;
    std::string address_;
    std::uint16_t port_;
    boost::asio::io_context io_;
    detail::tcp::acceptor acceptor_;
    detail::Registry registry_;
    std::vector<std::thread> pool_;
};

}  // namespace homectx
