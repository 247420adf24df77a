"""Command-line entry points.

    fmsr encode   --n N --file F --out DIR
    fmsr decode   --dir DIR --nodes 1,2 --out F
    fmsr repair   --dir DIR --failed I --scheme random|deterministic --seed S
    fmsr verify   --dir DIR
    fmsr simulate --n N --rounds R --runs M --scheme X --seed S --csv PATH
"""

import argparse
import sys
from pathlib import Path

from . import codec, properties, repair, store
from .simulation import SimulationConfig, run_simulation, summarize


class UsageError(Exception):
    pass


def encode_to_dir(path, n, out_dir):
    data = Path(path).read_bytes()
    state = codec.new_state(codec.CodeParams(n))
    meta, chunks = codec.encode(state, data)
    cluster = store.Cluster(out_dir, n)
    for c in chunks:
        cluster.write(c.id, c.payload)
    store.save_metadata(cluster.meta_path, store.MetadataFile(state, meta))
    return cluster, meta, chunks


def decode_from_dir(root, nodes):
    cluster, md = store.Cluster.open(root)
    k = md.state.params.k
    if len(nodes) != k:
        raise codec.NotDecodable(f"need exactly k = {k} nodes, got {len(nodes)}")
    chunks = [(cid, cluster.read(cid)) for i in nodes for cid in (codec.ChunkId(i, 1), codec.ChunkId(i, 2))]
    return codec.decode(md.state, md.file, chunks)


def repair_dir(root, failed, scheme="deterministic", seed=None):
    """Fail ``failed`` if it is still live, rebuild it, persist the new state.

    Returns ``(outcome, cluster)``; ``cluster.reads`` counts the chunk files
    read during the rebuild.
    """
    cluster, md = store.Cluster.open(root)
    if not cluster.store(failed).failed:
        cluster.fail(failed)
    out = repair.repair(md.state, failed, scheme, seed)
    cluster.reset_counters()
    new = repair.regenerate_payloads(out.plan.selection, out.plan.gamma, cluster.read)
    for j in (1, 2):
        cluster.write(codec.ChunkId(failed, j), new[j - 1].tobytes())
    store.save_metadata(cluster.meta_path, store.MetadataFile(out.new_state, md.file))
    return out, cluster


def verify_dir(root):
    _, md = store.Cluster.open(root)
    mds = properties.check_mds(md.state)
    rmds = properties.check_rmds(md.state)
    return mds, rmds


def cmd_encode(args):
    cluster, meta, chunks = encode_to_dir(args.file, args.n, args.out)
    print(f"encoded {meta.original_length} bytes into {len(chunks)} chunks of {meta.chunk_size} bytes")
    for c in chunks:
        print(f"  node {c.id.node}: {cluster.store(c.id.node).path(c.id)}")
    return 0


def cmd_decode(args):
    data = decode_from_dir(args.dir, args.nodes)
    Path(args.out).write_bytes(data)
    print(f"decoded {len(data)} bytes from nodes {','.join(map(str, args.nodes))}")
    return 0


def cmd_repair(args):
    out, cluster = repair_dir(args.dir, args.failed, args.scheme, args.seed)
    print(f"repaired node {args.failed} ({args.scheme})")
    print(f"  sources: {', '.join(str(c) for c in out.plan.sources)}")
    print(f"  chunks read: {cluster.reads}")
    print(f"  iterations: {out.iterations}")
    print(f"  checking time: {out.elapsed / 1e6:.3f} ms")
    return 0


def cmd_verify(args):
    mds, rmds = verify_dir(args.dir)
    print(f"MDS: {'ok' if mds else 'FAIL'}, rMDS: {'ok' if rmds else 'FAIL'}")
    return 0 if mds and rmds else 1


def cmd_simulate(args):
    config = SimulationConfig(
        n=args.n, rounds=args.rounds, runs=args.runs, scheme=args.scheme,
        seed=args.seed, output=args.csv, max_iters=args.max_iters)
    results = run_simulation(config, workers=args.workers)
    s = summarize(results)
    print(f"n={args.n} scheme={args.scheme} runs={s['runs']} rounds={s['rounds']}")
    print(f"  mean iterations per round: {s['mean_iterations']:.2f} (max {s['max_iterations']})")
    print(f"  mean aggregate checking time per run: {s['mean_aggregate_check_s']:.4f} s")
    for res in results:
        if not res.ok:
            print(f"  run seed={res.seed} FAILED: {res.error or 'final verification failed'}",
                  file=sys.stderr)
    return 0 if s["all_ok"] else 1


def _node_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node ids, got {text!r}")


def _node_count(text):
    n = int(text)
    try:
        codec.CodeParams(n)
    except codec.InvalidParams as e:
        raise argparse.ArgumentTypeError(str(e))
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="fmsr", description="FMSR codes with uncoded repair")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("encode", help="encode a file into node directories")
    e.add_argument("--n", type=_node_count, required=True)
    e.add_argument("--file", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="decode a file from k nodes")
    d.add_argument("--dir", required=True)
    d.add_argument("--nodes", type=_node_list, required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decode)

    r = sub.add_parser("repair", help="rebuild a failed node")
    r.add_argument("--dir", required=True)
    r.add_argument("--failed", type=int, required=True)
    r.add_argument("--scheme", choices=sorted(repair.SCHEMES), default="deterministic")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_repair)

    v = sub.add_parser("verify", help="check the MDS and rMDS properties")
    v.add_argument("--dir", required=True)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="multi-round repair benchmark, CSV output")
    s.add_argument("--n", type=_node_count, required=True)
    s.add_argument("--rounds", type=int, default=50)
    s.add_argument("--runs", type=int, default=30)
    s.add_argument("--scheme", choices=sorted(repair.SCHEMES), default="deterministic")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", default=None)
    s.add_argument("--max-iters", type=int, default=repair.DEFAULT_MAX_ITERS)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError, store.StoreError) as e:
        print(f"fmsr {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
