"""128-bit vector primitives emitted as LLVM IR through numba intrinsics.

The nibble-table lookup and the pairwise byte add have no target-neutral
LLVM form, so they are emitted per target: ``tbl``/``addp`` on aarch64,
``pshufb``/``pmaddubsw``+``packuswb`` on x86-64 with SSSE3.  Everything else
(and, cmeq, umaxv, uminv, orn, shrn, cttz) uses generic LLVM vector IR.
x86 also has a native movemask, which ``v_index64_block_movemask`` uses in
place of the bit-weight/pairwise-add aggregation (same bits, fewer shuffles).
On any other target ``TARGET`` is None and callers use the emulated backend.
"""

from __future__ import annotations

import platform

from llvmlite import binding as llvm
from llvmlite import ir
from numba import types
from numba.core import errors
from numba.extending import intrinsic

i8 = ir.IntType(8)
i16 = ir.IntType(16)
i32 = ir.IntType(32)
i64 = ir.IntType(64)
V16 = ir.VectorType(i8, 16)
V8W = ir.VectorType(i16, 8)


def _detect_target() -> str | None:
    machine = platform.machine().lower()
    if machine in ("aarch64", "arm64"):
        return "aarch64"
    if machine in ("x86_64", "amd64"):
        try:
            features = llvm.get_host_cpu_features()
        except RuntimeError:
            return None
        if features.get("ssse3", False):
            return "x86"
    return None


TARGET = _detect_target()


def _declare(builder, name, ret, args):
    module = builder.module
    try:
        return module.get_global(name)
    except KeyError:
        return ir.Function(module, ir.FunctionType(ret, args), name)


def _vec_ptr(context, builder, arrty, arrval, offset):
    ary = context.make_array(arrty)(context, builder, arrval)
    return builder.bitcast(builder.gep(ary.data, [offset]), V16.as_pointer())


def _load(context, builder, arrty, arrval, offset):
    return builder.load(_vec_ptr(context, builder, arrty, arrval, offset), align=1)


def _splat(value):
    return ir.Constant(V16, [value] * 16)


def _table_lookup(builder, table, idx):
    if TARGET == "aarch64":
        fn = _declare(builder, "llvm.aarch64.neon.tbl1.v16i8", V16, [V16, V16])
        return builder.call(fn, [table, idx])
    # pshufb zeroes lanes whose index has the top bit set; indices here are < 16
    fn = _declare(builder, "llvm.x86.ssse3.pshuf.b.128", V16, [V16, V16])
    return builder.call(fn, [table, idx])


def _pairwise_add(builder, a, b):
    if TARGET == "aarch64":
        fn = _declare(builder, "llvm.aarch64.neon.addp.v16i8", V16, [V16, V16])
        return builder.call(fn, [a, b])
    madd = _declare(builder, "llvm.x86.ssse3.pmadd.ub.sw.128", V8W, [V16, V16])
    pack = _declare(builder, "llvm.x86.sse2.packuswb.128", V16, [V8W, V8W])
    ones = _splat(1)
    return builder.call(pack, [builder.call(madd, [a, ones]), builder.call(madd, [b, ones])])


def _classify(builder, table, block):
    low = builder.and_(block, _splat(0x0F))
    eq = builder.icmp_unsigned("==", _table_lookup(builder, table, low), block)
    return builder.sext(eq, V16)


def _reduce(builder, kind, vec):
    fn = _declare(builder, f"llvm.vector.reduce.{kind}.v16i8", i8, [V16])
    return builder.call(fn, [vec])


def _webkit_first(builder, lanes):
    """max-across short circuit, then min-across of (index OR NOT lanes); 16 means no match."""
    entry = builder.block
    mx = _reduce(builder, "umax", lanes)
    with builder.if_then(builder.icmp_unsigned("!=", mx, ir.Constant(i8, 0)), likely=False):
        ornot = builder.or_(ir.Constant(V16, list(range(16))), builder.not_(lanes))
        found = builder.zext(_reduce(builder, "umin", ornot), i64)
        hit = builder.block
    result = builder.phi(i64)
    result.add_incoming(ir.Constant(i64, 16), entry)
    result.add_incoming(found, hit)
    return result


def _blink_narrow(builder, lanes):
    words = builder.bitcast(lanes, V8W)
    shifted = builder.lshr(words, ir.Constant(V8W, [4] * 8))
    narrowed = builder.trunc(shifted, ir.VectorType(i8, 8))
    return builder.bitcast(narrowed, i64)


_WEIGHTS = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80] * 2


def _movemask(builder, lanes):
    bits = builder.icmp_unsigned("!=", lanes, _splat(0))
    return builder.zext(builder.bitcast(bits, i16), i64)


def _index64(context, builder, arrty, arrval, offset, table, pairwise=True):
    blocks = []
    for k in range(4):
        sub = builder.add(offset, ir.Constant(offset.type, 16 * k))
        blocks.append(_classify(builder, table, _load(context, builder, arrty, arrval, sub)))
    if not pairwise:
        mask = _movemask(builder, blocks[0])
        for k in range(1, 4):
            mask = builder.or_(mask, builder.shl(_movemask(builder, blocks[k]), ir.Constant(i64, 16 * k)))
        return mask
    weighted = [builder.and_(lanes, ir.Constant(V16, _WEIGHTS)) for lanes in blocks]
    sum0 = _pairwise_add(builder, weighted[0], weighted[1])
    sum1 = _pairwise_add(builder, weighted[2], weighted[3])
    folded = _pairwise_add(builder, sum0, sum1)
    folded = _pairwise_add(builder, folded, folded)
    halves = builder.bitcast(folded, ir.VectorType(i64, 2))
    return builder.extract_element(halves, ir.Constant(i32, 0))


def _require(*conds):
    if TARGET is None:
        raise errors.TypingError("no 128-bit vector target available on this host")
    if not all(conds):
        raise errors.TypingError("expected (uint8 array, int offset, uint8 array) arguments")


def _is_u8(ty):
    return isinstance(ty, types.Array) and ty.dtype == types.uint8 and ty.ndim == 1


def _table(context, builder, sig, args, pos):
    return _load(context, builder, sig.args[pos], args[pos], ir.Constant(i64, 0))


def _offset(context, builder, sig, args, pos):
    return context.cast(builder, args[pos], sig.args[pos], types.intp)


@intrinsic
def v_classify(typingctx, data, offset, table, out):
    """Store the 16 classified lanes of data[offset:offset+16] into out[0:16]."""
    _require(_is_u8(data), isinstance(offset, types.Integer), _is_u8(table), _is_u8(out))
    sig = types.void(data, offset, table, out)

    def codegen(context, builder, sig, args):
        off = _offset(context, builder, sig, args, 1)
        lanes = _classify(builder, _table(context, builder, sig, args, 2),
                          _load(context, builder, sig.args[0], args[0], off))
        builder.store(lanes, _vec_ptr(context, builder, sig.args[3], args[3], ir.Constant(i64, 0)), align=1)
        return context.get_dummy_value()

    return sig, codegen


@intrinsic
def v_webkit_first(typingctx, lanes):
    _require(_is_u8(lanes))
    sig = types.int64(lanes)

    def codegen(context, builder, sig, args):
        return _webkit_first(builder, _load(context, builder, sig.args[0], args[0], ir.Constant(i64, 0)))

    return sig, codegen


@intrinsic
def v_blink_narrow(typingctx, lanes):
    _require(_is_u8(lanes))
    sig = types.uint64(lanes)

    def codegen(context, builder, sig, args):
        return _blink_narrow(builder, _load(context, builder, sig.args[0], args[0], ir.Constant(i64, 0)))

    return sig, codegen


@intrinsic
def v_webkit_block(typingctx, data, offset, table):
    _require(_is_u8(data), isinstance(offset, types.Integer), _is_u8(table))
    sig = types.int64(data, offset, table)

    def codegen(context, builder, sig, args):
        off = _offset(context, builder, sig, args, 1)
        lanes = _classify(builder, _table(context, builder, sig, args, 2),
                          _load(context, builder, sig.args[0], args[0], off))
        return _webkit_first(builder, lanes)

    return sig, codegen


@intrinsic
def v_blink_block(typingctx, data, offset, table):
    _require(_is_u8(data), isinstance(offset, types.Integer), _is_u8(table))
    sig = types.uint64(data, offset, table)

    def codegen(context, builder, sig, args):
        off = _offset(context, builder, sig, args, 1)
        lanes = _classify(builder, _table(context, builder, sig, args, 2),
                          _load(context, builder, sig.args[0], args[0], off))
        return _blink_narrow(builder, lanes)

    return sig, codegen


@intrinsic
def v_index64_block(typingctx, data, offset, table):
    _require(_is_u8(data), isinstance(offset, types.Integer), _is_u8(table))
    sig = types.uint64(data, offset, table)

    def codegen(context, builder, sig, args):
        off = _offset(context, builder, sig, args, 1)
        return _index64(context, builder, sig.args[0], args[0], off, _table(context, builder, sig, args, 2))

    return sig, codegen


@intrinsic
def v_index64_block_movemask(typingctx, data, offset, table):
    _require(_is_u8(data), isinstance(offset, types.Integer), _is_u8(table))
    sig = types.uint64(data, offset, table)

    def codegen(context, builder, sig, args):
        off = _offset(context, builder, sig, args, 1)
        return _index64(context, builder, sig.args[0], args[0], off,
                        _table(context, builder, sig, args, 2), pairwise=False)

    return sig, codegen


@intrinsic
def cttz64(typingctx, x):
    """Trailing zero count of a nonzero 64-bit word."""
    if not isinstance(x, types.Integer) or x.bitwidth != 64:
        raise errors.TypingError("cttz64 expects a 64-bit integer")
    sig = types.int64(x)

    def codegen(context, builder, sig, args):
        fn = _declare(builder, "llvm.cttz.i64", i64, [i64, ir.IntType(1)])
        return builder.call(fn, [args[0], ir.Constant(ir.IntType(1), 1)])

    return sig, codegen
