#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace wavebench {

/// Fixed set of lanes, each an in-order queue drained by its own worker thread.
///
/// Tasks on one lane run in submission order; tasks on different lanes may overlap.
/// wait() is the barrier: it returns once every submitted task has finished and rethrows
/// the first exception any of them raised.
class TaskPool {
 public:
  explicit TaskPool(int lanes);
  ~TaskPool();

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  [[nodiscard]] int lanes() const noexcept { return static_cast<int>(lanes_.size()); }

  void submit(int lane, std::function<void()> task);
  void wait();

 private:
  struct Lane {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::function<void()>> queue;
    std::jthread worker;
  };

  void drain(Lane& lane, std::stop_token stop);
  void finish_one(std::exception_ptr error);

  std::vector<std::unique_ptr<Lane>> lanes_;
  std::mutex done_mutex_;
  std::condition_variable done_cv_;
  std::size_t pending_ = 0;
  std::exception_ptr first_error_;
};

}  // namespace wavebench
