#include "wavebench/task_pool.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "wavebench/error.hpp"

namespace wavebench {

TaskPool::TaskPool(int lanes) {
  if (lanes < 1) {
    throw ConfigurationError("task pool needs at least one lane, got " + std::to_string(lanes));
  }
  lanes_.reserve(static_cast<std::size_t>(lanes));
  for (int i = 0; i < lanes; ++i) {
    lanes_.push_back(std::make_unique<Lane>());
  }
  for (auto& lane : lanes_) {
    Lane* l = lane.get();
    l->worker = std::jthread([this, l](std::stop_token stop) { drain(*l, stop); });
  }
}

TaskPool::~TaskPool() {
  for (auto& lane : lanes_) {
    {
      std::lock_guard lock(lane->mutex);
      lane->worker.request_stop();
    }
    lane->cv.notify_all();
  }
  for (auto& lane : lanes_) {
    if (lane->worker.joinable()) {
      lane->worker.join();
    }
  }
}

void TaskPool::submit(int lane, std::function<void()> task) {
  if (lane < 0 || lane >= lanes()) {
    throw ConfigurationError("lane " + std::to_string(lane) + " out of range");
  }
  {
    std::lock_guard lock(done_mutex_);
    ++pending_;
  }
  Lane& l = *lanes_[static_cast<std::size_t>(lane)];
  {
    std::lock_guard lock(l.mutex);
    l.queue.push_back(std::move(task));
  }
  l.cv.notify_one();
}

void TaskPool::wait() {
  std::unique_lock lock(done_mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  if (first_error_) {
    auto error = std::exchange(first_error_, nullptr);
    std::rethrow_exception(error);
  }
}

void TaskPool::drain(Lane& lane, std::stop_token stop) {
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(lane.mutex);
      lane.cv.wait(lock, [&] { return stop.stop_requested() || !lane.queue.empty(); });
      if (lane.queue.empty()) {
        return;
      }
      task = std::move(lane.queue.front());
      lane.queue.pop_front();
    }
    std::exception_ptr error;
    try {
      task();
    } catch (...) {
      error = std::current_exception();
    }
    finish_one(error);
  }
}

void TaskPool::finish_one(std::exception_ptr error) {
  {
    std::lock_guard lock(done_mutex_);
    if (error && !first_error_) {
      first_error_ = error;
    }
    --pending_;
  }
  done_cv_.notify_all();
}

}  // namespace wavebench
