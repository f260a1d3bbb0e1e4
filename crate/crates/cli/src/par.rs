//! Minimal deterministic fan-out over OS threads.

/// Map `f` over `0..len` using at most `threads` workers, collecting results
/// in index order. Results are independent of the thread count.
pub fn par_map<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.max(1).min(len.max(1));
    if threads == 1 {
        return (0..len).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..len).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots_ref = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= len {
                    break;
                }
                let value = f(i);
                let mut guard = slots_ref.lock().unwrap();
                guard[i] = Some(value);
            });
        }
    });
    slots.into_iter().map(|s| s.expect("filled")).collect()
}

/// Worker cap from the `--threads` flag, defaulting to the machine.
pub fn thread_count(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order_and_matches_serial() {
        let serial = par_map(37, 1, |i| i * i);
        let parallel = par_map(37, 4, |i| i * i);
        assert_eq!(serial, parallel);
    }
}
