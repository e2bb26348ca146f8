#pragma once

#include "cqsync/barrier.hpp"
#include "cqsync/cqs.hpp"
#include "cqsync/future.hpp"
#include "cqsync/latch.hpp"
#include "cqsync/pool.hpp"
#include "cqsync/segment_list.hpp"
#include "cqsync/semaphore.hpp"
