#pragma once

#include "cbtree/error.hpp"
#include "cbtree/dyadic.hpp"
#include "cbtree/description.hpp"
#include "cbtree/treeset.hpp"
#include "cbtree/pruning.hpp"
#include "cbtree/oracle.hpp"
#include "cbtree/order.hpp"
