"""Block lifecycle: generation, hand-off, proof-of-work mining, chain append.

Blocks hash with SHA-256 over a canonical 96-byte encoding (fixed-width
little-endian fields in order: id, creator, created_tick, prev_hash,
payload_digest, nonce) so any two builds of the encoding agree bit for bit.
The mining target for difficulty k bits is 2^(256-k); expected attempts to
find a winning nonce are 2^k.

All operations are pure state transitions on frozen values; the simulation
loop owns sequencing, so appends never race.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence, Union

from .rng import SplitMix64

GENESIS_HASH = bytes(32)
_U64 = (1 << 64) - 1


class Role(str, Enum):
    FULL = "full"
    HALF = "half"


class BlockStatus(str, Enum):
    GENERATED = "generated"
    IN_TRANSIT = "in_transit"
    MINING = "mining"
    VALIDATED = "validated"
    EXPIRED = "expired"


class NoActiveNodes(Exception):
    pass


class NoLink(Exception):
    pass


class NotHolder(Exception):
    pass


class RoleViolation(Exception):
    """Mining attempted by a half node."""


class StaleParent(Exception):
    """Block's prev_hash no longer matches the chain head."""


class NotValidated(Exception):
    """Block's header hash does not meet the target."""


@dataclass(frozen=True)
class Block:
    id: int
    creator: int
    created_tick: int
    prev_hash: bytes
    payload_digest: bytes
    nonce: int = 0
    status: BlockStatus = BlockStatus.GENERATED


@dataclass(frozen=True)
class Chain:
    blocks: tuple[Block, ...] = ()

    @property
    def head_hash(self) -> bytes:
        return header_hash(self.blocks[-1]) if self.blocks else GENESIS_HASH

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class MiningJob:
    block: Block
    miner: int
    miner_role: Role
    attempts_done: int = 0
    next_nonce: int = 0


@dataclass(frozen=True)
class Found:
    nonce: int
    attempts: int


@dataclass(frozen=True)
class InProgress:
    job: MiningJob


MineOutcome = Union[Found, InProgress]


def target_for_difficulty(bits: int) -> int:
    if not 0 <= bits <= 256:
        raise ValueError("difficulty bits must be in [0, 256]")
    return 1 << (256 - bits)


def payload_digest(block_id: int, creator: int, created_tick: int) -> bytes:
    body = (
        block_id.to_bytes(8, "little")
        + creator.to_bytes(8, "little")
        + created_tick.to_bytes(8, "little")
    )
    return hashlib.sha256(body).digest()


def encode_block(block: Block) -> bytes:
    """Canonical 96-byte encoding hashed for proof of work."""
    return (
        block.id.to_bytes(8, "little")
        + block.creator.to_bytes(8, "little")
        + block.created_tick.to_bytes(8, "little")
        + block.prev_hash
        + block.payload_digest
        + block.nonce.to_bytes(8, "little")
    )


def decode_block(raw: bytes, status: BlockStatus = BlockStatus.VALIDATED) -> Block:
    if len(raw) != 96:
        raise ValueError("canonical block encoding is 96 bytes")
    return Block(
        id=int.from_bytes(raw[0:8], "little"),
        creator=int.from_bytes(raw[8:16], "little"),
        created_tick=int.from_bytes(raw[16:24], "little"),
        prev_hash=raw[24:56],
        payload_digest=raw[56:88],
        nonce=int.from_bytes(raw[88:96], "little"),
        status=status,
    )


def header_hash(block: Block) -> bytes:
    return hashlib.sha256(encode_block(block)).digest()


def meets_target(digest: bytes, target: int) -> bool:
    return int.from_bytes(digest, "big") < target


def generate_block(
    rng: SplitMix64,
    tick: int,
    nodes: Sequence[int],
    chain_head_hash: bytes,
    block_id: int,
) -> tuple[Block, int]:
    """Create a fresh block at a creator drawn uniformly from the given nodes."""
    if not nodes:
        raise NoActiveNodes("no active nodes to generate a block at")
    creator = nodes[rng.randrange(len(nodes))]
    block = Block(
        id=block_id & _U64,
        creator=creator,
        created_tick=tick,
        prev_hash=chain_head_hash,
        payload_digest=payload_digest(block_id & _U64, creator, tick),
    )
    return block, creator


def start_transfer(block: Block, holder, receiver, verdict) -> Block:
    """Begin an atomic same-tick hand-off; the caller moves ownership."""
    if block.id not in holder.carried:
        raise NotHolder(f"node {getattr(holder, 'id', '?')} does not hold block {block.id}")
    if not verdict.usable:
        raise NoLink(f"no usable {verdict.tech} link for block {block.id}")
    return replace(block, status=BlockStatus.IN_TRANSIT)


def start_mining(block: Block, miner: int, miner_role: Role) -> MiningJob:
    if miner_role is not Role.FULL:
        raise RoleViolation(f"node {miner} is a half node and cannot mine")
    return MiningJob(block=replace(block, status=BlockStatus.MINING), miner=miner, miner_role=miner_role)


def mine_step(job: MiningJob, hashes_this_tick: int, target: int) -> MineOutcome:
    """Try the next window of nonces; Found at the first winner, else advance.

    Re-checks the miner's role: this is the enforcement point for the
    full-nodes-only rule even if a caller slipped past validation.
    """
    if job.miner_role is not Role.FULL:
        raise RoleViolation(f"node {job.miner} is a half node and cannot mine")
    if hashes_this_tick < 1:
        raise ValueError("hash budget must be >= 1")
    prefix = encode_block(job.block)[:88]
    nonce = job.next_nonce
    for i in range(hashes_this_tick):
        digest = hashlib.sha256(prefix + ((nonce + i) & _U64).to_bytes(8, "little")).digest()
        if meets_target(digest, target):
            return Found(nonce=(nonce + i) & _U64, attempts=job.attempts_done + i + 1)
    return InProgress(
        replace(
            job,
            attempts_done=job.attempts_done + hashes_this_tick,
            next_nonce=(nonce + hashes_this_tick) & _U64,
        )
    )


def append(chain: Chain, block: Block, target: int) -> Chain:
    """Append a mined block; the parent must still be the chain head."""
    if block.prev_hash != chain.head_hash:
        raise StaleParent(f"block {block.id} references a superseded parent")
    if not meets_target(header_hash(block), target):
        raise NotValidated(f"block {block.id} does not meet the difficulty target")
    return Chain(chain.blocks + (replace(block, status=BlockStatus.VALIDATED),))


def verify_chain(chain: Chain, target: int) -> bool:
    """Audit every chain invariant: linkage, difficulty, payload integrity."""
    prev = GENESIS_HASH
    for block in chain.blocks:
        if block.prev_hash != prev:
            return False
        digest = header_hash(block)
        if not meets_target(digest, target):
            return False
        if block.payload_digest != payload_digest(block.id, block.creator, block.created_tick):
            return False
        prev = digest
    return True
